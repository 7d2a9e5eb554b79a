/**
 * Bridge to the balloonsim simulation core.
 *
 * One SimBridge owns a long-lived `balloonsim serve` child process speaking
 * JSON lines over stdio; any number of environment handles multiplex over
 * it. The bridge owns no simulation logic: every value it returns came from
 * the core unchanged.
 */

import { ChildProcessByStdio, spawn } from 'node:child_process';
import { Readable, Writable } from 'node:stream';
import { createInterface, Interface } from 'node:readline';

export interface StepOutcome {
  observation: number[];
  reward: number;
  terminated: boolean;
  truncated: boolean;
  diagnostics: Record<string, number | boolean>;
}

export interface BridgeOptions {
  /** Python executable running the core; default `python3`. */
  python?: string;
}

export class BridgeError extends Error {}

interface RpcResponse {
  id: number;
  ok: boolean;
  error?: string;
  [key: string]: unknown;
}

export class SimBridge {
  private child: ChildProcessByStdio<Writable, Readable, null>;
  private reader: Interface;
  private nextId = 1;
  private pending = new Map<number, (response: RpcResponse) => void>();
  private closed = false;

  private constructor(child: ChildProcessByStdio<Writable, Readable, null>) {
    this.child = child;
    this.reader = createInterface({ input: child.stdout });
    this.reader.on('line', (line) => {
      if (!line.trim()) return;
      const response = JSON.parse(line) as RpcResponse;
      const resolve = this.pending.get(response.id);
      if (resolve) {
        this.pending.delete(response.id);
        resolve(response);
      }
    });
    child.on('exit', () => {
      this.closed = true;
      for (const resolve of this.pending.values()) {
        resolve({ id: -1, ok: false, error: 'core process exited' });
      }
      this.pending.clear();
    });
  }

  static launch(options: BridgeOptions = {}): SimBridge {
    const python = options.python ?? process.env.BALLOONSIM_PYTHON ?? 'python3';
    const child = spawn(python, ['-m', 'balloonsim.cli', 'serve'], {
      stdio: ['pipe', 'pipe', 'inherit'],
    });
    return new SimBridge(child);
  }

  request(message: Record<string, unknown>): Promise<RpcResponse> {
    if (this.closed) {
      return Promise.reject(new BridgeError('bridge is shut down'));
    }
    const id = this.nextId++;
    return new Promise((resolve, reject) => {
      this.pending.set(id, (response) => {
        if (response.ok) resolve(response);
        else reject(new BridgeError(response.error ?? 'unknown core error'));
      });
      this.child.stdin.write(JSON.stringify({ id, ...message }) + '\n');
    });
  }

  /** Create an environment from a core config file. */
  async createEnv(configPath: string): Promise<EnvHandle> {
    const response = await this.request({ op: 'create', config_path: configPath });
    return new EnvHandle(
      this,
      response.handle as number,
      response.observation_size as number,
      response.action_count as number,
    );
  }

  async shutdown(): Promise<void> {
    if (this.closed) return;
    try {
      await this.request({ op: 'shutdown' });
    } catch {
      // already gone
    }
    this.closed = true;
    this.child.stdin.end();
  }
}

export class EnvHandle {
  private live = true;

  constructor(
    private bridge: SimBridge,
    private handle: number,
    readonly observationSize: number,
    readonly actionCount: number,
  ) {}

  private assertLive(): void {
    if (!this.live) throw new BridgeError('handle is closed');
  }

  async reset(seed?: number): Promise<number[]> {
    this.assertLive();
    const response = await this.bridge.request({
      op: 'reset',
      handle: this.handle,
      ...(seed === undefined ? {} : { seed }),
    });
    return response.observation as number[];
  }

  async step(action: 0 | 1 | 2): Promise<StepOutcome> {
    this.assertLive();
    const response = await this.bridge.request({
      op: 'step',
      handle: this.handle,
      action,
    });
    return {
      observation: response.observation as number[],
      reward: response.reward as number,
      terminated: response.terminated as boolean,
      truncated: response.truncated as boolean,
      diagnostics: response.diagnostics as Record<string, number | boolean>,
    };
  }

  async close(): Promise<void> {
    if (!this.live) return;
    this.live = false;
    await this.bridge.request({ op: 'close', handle: this.handle });
  }
}
