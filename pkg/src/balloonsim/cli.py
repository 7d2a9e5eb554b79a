"""Command-line entry point.

Subcommands:
  run         one episode under a scripted policy, trajectory to a file
  sweep       the same episode across many seeds, optionally in parallel
  atmosphere  standard-atmosphere table as CSV on stdout
  wind-synth  emit a synthetic wind field file
  serve       JSON-lines RPC over stdio for foreign-language bridges

Exit codes: 0 success, 1 episode-level failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import wind as windmod
from .atmosphere import AltitudeRangeError, AtmosphereModel
from .control import Command
from .env import BalloonEnv, ConfigError, EnvConfig, load_config, \
    parse_wind_synth_spec
from .wind import WindFileError, WindSynthesisError

TRAJECTORY_FIELDS = ("t", "x", "y", "h", "v", "n_helium", "m_sand",
                     "action", "reward", "terminated", "truncated")


class PolicyError(ValueError):
    pass


_COMMAND_NAMES = {"down": Command.DOWN, "float": Command.FLOAT, "up": Command.UP}


def _parse_command(token: str) -> Command:
    token = token.strip().lower()
    if token in _COMMAND_NAMES:
        return _COMMAND_NAMES[token]
    try:
        return Command(int(token))
    except (ValueError, KeyError):
        raise PolicyError(f"unknown action {token!r}; use down/float/up or 0/1/2")


class ConstantPolicy:
    def __init__(self, command: Command):
        self.command = command

    def act(self, step: int, altitude: float, ascent_rate: float) -> Command:
        return self.command


class AltitudeHoldPolicy:
    """Bang-bang hold: Up below the band, Down above it, Float inside."""

    def __init__(self, target_altitude: float, hysteresis: float):
        if hysteresis <= 0:
            raise PolicyError("altitude-hold hysteresis must be positive")
        self.target = target_altitude
        self.hysteresis = hysteresis

    def act(self, step: int, altitude: float, ascent_rate: float) -> Command:
        if altitude < self.target - self.hysteresis:
            return Command.UP
        if altitude > self.target + self.hysteresis:
            return Command.DOWN
        return Command.FLOAT


class RandomPolicy:
    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def act(self, step: int, altitude: float, ascent_rate: float) -> Command:
        return Command(int(self.rng.integers(0, 3)))


class ReplayPolicy:
    def __init__(self, path: str):
        with open(path, encoding="utf-8") as fh:
            self.actions = [_parse_command(line) for line in fh
                            if line.strip() and not line.startswith("#")]

    def act(self, step: int, altitude: float, ascent_rate: float) -> Command:
        if step >= len(self.actions):
            raise PolicyError(
                f"replay file exhausted at step {step} ({len(self.actions)} actions)")
        return self.actions[step]


def make_policy(spec: str):
    """Parse 'constant:<cmd>' | 'altitude-hold:<h>:<hyst>' | 'random:<seed>'
    | 'replay:<file>'."""
    kind, _, rest = spec.partition(":")
    if kind == "constant":
        return ConstantPolicy(_parse_command(rest or "float"))
    if kind == "altitude-hold":
        parts = rest.split(":")
        if len(parts) != 2:
            raise PolicyError("altitude-hold needs target:hysteresis")
        return AltitudeHoldPolicy(float(parts[0]), float(parts[1]))
    if kind == "random":
        return RandomPolicy(int(rest or "0"))
    if kind == "replay":
        if not rest:
            raise PolicyError("replay needs a file path")
        return ReplayPolicy(rest)
    raise PolicyError(f"unknown policy kind {kind!r}")


# --- episode running -------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_episode(env: BalloonEnv, policy, seed: int | None):
    """Run one full episode; returns (records, total_reward, cause)."""
    env.reset(seed=seed)
    records = []
    step = 0
    total_reward = 0.0
    cause = "max_steps"
    while True:
        state = env.state
        action = policy.act(step, state.vertical.altitude,
                            state.vertical.ascent_rate)
        result = env.step(action)
        total_reward += result.reward
        d = result.diagnostics
        records.append({
            "t": (step + 1) * env.config.dt_control,
            "x": d["x"], "y": d["y"], "h": d["altitude"], "v": d["ascent_rate"],
            "n_helium": d["n_helium"], "m_sand": d["m_sand"],
            "action": action.value, "reward": result.reward,
            "terminated": result.terminated, "truncated": result.truncated,
        })
        step += 1
        if result.terminated:
            cause = "altitude_bounds" if not (
                env.config.altitude_min <= d["altitude"] <= env.config.altitude_max
            ) else "uncontrollable"
            break
        if result.truncated:
            cause = "max_steps"
            break
    return records, total_reward, cause


def write_trajectory(records, path: str, fmt: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if fmt == "csv":
            fh.write(",".join(TRAJECTORY_FIELDS) + "\n")
            for rec in records:
                fh.write(",".join(_fmt(rec[k]) for k in TRAJECTORY_FIELDS) + "\n")
        else:  # jsonl
            for rec in records:
                fh.write(json.dumps(rec) + "\n")


# --- subcommands -----------------------------------------------------------

def cmd_run(args) -> int:
    config = _load_config_with_overrides(args)
    env = BalloonEnv(config)
    policy = make_policy(args.policy)
    try:
        records, total_reward, cause = run_episode(env, policy, args.seed)
    except PolicyError as exc:
        print(f"episode failed: {exc}", file=sys.stderr)
        return 1
    if args.out:
        write_trajectory(records, args.out, args.format)
    print(f"steps={len(records)} total_reward={total_reward!r} termination={cause}")
    return 0


def _sweep_one(config_path, overrides, policy_spec, seed, out_dir, fmt):
    args = argparse.Namespace(config=config_path, wind=overrides.get("wind"),
                              wind_synth=overrides.get("wind_synth"))
    config = _load_config_with_overrides(args)
    env = BalloonEnv(config)
    policy = make_policy(policy_spec)
    records, total_reward, cause = run_episode(env, policy, seed)
    path = os.path.join(out_dir, f"trajectory_seed{seed}.{fmt}")
    write_trajectory(records, path, fmt)
    return seed, len(records), total_reward, cause


def cmd_sweep(args) -> int:
    seeds = _parse_seeds(args.seeds)
    os.makedirs(args.out, exist_ok=True)
    overrides = {"wind": args.wind, "wind_synth": args.wind_synth}
    parallelism = args.parallelism or os.cpu_count() or 1
    results = []
    failures = []
    if parallelism == 1:
        for seed in seeds:
            try:
                results.append(_sweep_one(args.config, overrides, args.policy,
                                          seed, args.out, args.format))
            except Exception as exc:  # per-seed isolation
                failures.append((seed, str(exc)))
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=parallelism) as pool:
            futures = {pool.submit(_sweep_one, args.config, overrides, args.policy,
                                   seed, args.out, args.format): seed
                       for seed in seeds}
            for future, seed in futures.items():
                try:
                    results.append(future.result())
                except Exception as exc:
                    failures.append((seed, str(exc)))
    results.sort(key=lambda r: r[0])
    summary_path = os.path.join(args.out, "summary.csv")
    with open(summary_path, "w", encoding="utf-8") as fh:
        fh.write("seed,steps,total_reward,termination\n")
        for seed, steps, total_reward, cause in results:
            fh.write(f"{seed},{steps},{total_reward!r},{cause}\n")
    for seed, message in failures:
        print(f"seed {seed} failed: {message}", file=sys.stderr)
    print(f"seeds={len(seeds)} completed={len(results)} summary={summary_path}")
    return 1 if failures else 0


def cmd_atmosphere(args) -> int:
    if args.step <= 0:
        raise ConfigError(f"step must be positive, got {args.step}")
    if args.max < args.min:
        raise ConfigError(f"empty altitude range [{args.min}, {args.max}]")
    model = AtmosphereModel()
    print("altitude,temperature,pressure,density")
    h = args.min
    while h <= args.max + 1e-9:
        if args.geopotential:
            sample = model.sample_geopotential(h)
        else:
            sample = model.sample(h)
        print(f"{_fmt(float(h))},{sample.temperature!r},"
              f"{sample.pressure!r},{sample.density!r}")
        h += args.step
    return 0


def cmd_wind_synth(args) -> int:
    kind, params, seed = parse_wind_synth_spec(args.spec)
    field = windmod.synthesize(kind, params, seed)
    windmod.save_windfield(field, args.out)
    print(f"wrote {args.out} ({'x'.join(str(c) for c in field.counts)} grid)")
    return 0


def cmd_serve(args) -> int:
    """JSON-lines RPC: create/reset/step/close/shutdown, many handles per
    process. Used by out-of-process bridges."""
    from .env import ACTION_COUNT, OBSERVATION_SIZE
    handles: dict[int, BalloonEnv] = {}
    next_handle = 1
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        request = json.loads(line)
        response = {"id": request.get("id")}
        try:
            op = request["op"]
            if op == "create":
                config = load_config(request["config_path"])
                env = BalloonEnv(config)
                handle = next_handle
                next_handle += 1
                handles[handle] = env
                response.update(handle=handle,
                                observation_size=OBSERVATION_SIZE,
                                action_count=ACTION_COUNT)
            elif op == "reset":
                env = _get_handle(handles, request)
                obs = env.reset(seed=request.get("seed"))
                response.update(observation=obs.tolist())
            elif op == "step":
                env = _get_handle(handles, request)
                action = int(request["action"])
                if action not in (0, 1, 2):
                    raise ValueError(f"action must be 0, 1, or 2, got {action}")
                result = env.step(action)
                response.update(
                    observation=result.observation.tolist(),
                    reward=result.reward,
                    terminated=result.terminated,
                    truncated=result.truncated,
                    diagnostics={k: v for k, v in result.diagnostics.items()
                                 if not isinstance(v, list)},
                )
            elif op == "close":
                handle = int(request["handle"])
                if handle not in handles:
                    raise KeyError(f"no live handle {handle}")
                del handles[handle]
                response.update(closed=True)
            elif op == "shutdown":
                print(json.dumps({**response, "ok": True}), flush=True)
                return 0
            else:
                raise ValueError(f"unknown op {op!r}")
            response["ok"] = True
        except Exception as exc:
            response.update(ok=False, error=f"{type(exc).__name__}: {exc}")
        print(json.dumps(response), flush=True)
    return 0


def _get_handle(handles, request) -> BalloonEnv:
    handle = int(request["handle"])
    try:
        return handles[handle]
    except KeyError:
        raise KeyError(f"no live handle {handle}")


# --- plumbing --------------------------------------------------------------

def _load_config_with_overrides(args) -> EnvConfig:
    if args.config:
        config = load_config(args.config)
    else:
        config = EnvConfig()
    if getattr(args, "wind", None):
        config = replace(config, wind_file=args.wind)
    if getattr(args, "wind_synth", None):
        config = replace(config, wind_file=None, wind_synth=args.wind_synth)
    return config


def _parse_seeds(spec: str) -> list[int]:
    seeds = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            lo, _, hi = chunk.partition("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        else:
            seeds.append(int(chunk))
    return seeds


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="balloonsim")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="run one episode")
    run.add_argument("--config", default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--policy", default="constant:float")
    run.add_argument("--wind", default=None)
    run.add_argument("--wind-synth", dest="wind_synth", default=None)
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run one episode per seed")
    sweep.add_argument("--config", default=None)
    sweep.add_argument("--seeds", required=True,
                       help="comma list and/or ranges, e.g. 0..9 or 1,2,5")
    sweep.add_argument("--policy", default="constant:float")
    sweep.add_argument("--wind", default=None)
    sweep.add_argument("--wind-synth", dest="wind_synth", default=None)
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    sweep.add_argument("--parallelism", type=int, default=None)
    sweep.set_defaults(func=cmd_sweep)

    atmo = sub.add_parser("atmosphere", help="print an atmosphere table")
    atmo.add_argument("--min", type=float, default=0.0)
    atmo.add_argument("--max", type=float, default=86_000.0)
    atmo.add_argument("--step", type=float, default=1_000.0)
    atmo.add_argument("--geopotential", action="store_true",
                      help="interpret altitudes as geopotential")
    atmo.set_defaults(func=cmd_atmosphere)

    synth = sub.add_parser("wind-synth", help="write a synthetic wind field")
    synth.add_argument("--spec", required=True, help="kind:params[:seed]")
    synth.add_argument("--out", required=True)
    synth.set_defaults(func=cmd_wind_synth)

    serve = sub.add_parser("serve", help="stdio JSON-lines RPC server")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, WindFileError, WindSynthesisError, PolicyError,
            AltitudeRangeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
