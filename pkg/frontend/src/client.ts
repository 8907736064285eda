/**
 * TCP session against a bench server.
 *
 * The protocol is strictly request/reply, so commands are serialized: each
 * waits for the previous reply before hitting the wire.  The client holds
 * no other state — replaying a transcript against a fresh server yields
 * identical parsed structures.
 */

import * as net from 'node:net';

import {
  CommandTimeoutError,
  ConnectionClosedError,
  ProtocolViolationError,
} from './errors.js';
import {
  expectsBlock,
  LineBuffer,
  readReply,
  type Reply,
} from './protocol.js';

export interface ConnectOptions {
  host?: string;
  port: number;
  /** Per-reply deadline in milliseconds (default 30 000). */
  timeoutMs?: number;
}

export class BenchClient {
  private readonly lines: string[] = [];
  private waiter: {
    resolve: (line: string) => void;
    reject: (err: Error) => void;
  } | null = null;
  private closed: Error | null = null;
  private chain: Promise<unknown> = Promise.resolve();

  private constructor(
    private readonly socket: net.Socket,
    private readonly timeoutMs: number,
  ) {
    const buffer = new LineBuffer();
    socket.setEncoding('utf8');
    socket.on('data', (chunk: string) => {
      for (const line of buffer.push(chunk)) {
        if (this.waiter) {
          const w = this.waiter;
          this.waiter = null;
          w.resolve(line);
        } else {
          this.lines.push(line);
        }
      }
    });
    const fail = (err: Error) => {
      if (!this.closed) this.closed = err;
      if (this.waiter) {
        const w = this.waiter;
        this.waiter = null;
        w.reject(this.closed);
      }
    };
    socket.on('error', (err) =>
      fail(new ConnectionClosedError(`connection error: ${err.message}`)),
    );
    socket.on('close', () =>
      fail(new ConnectionClosedError('connection closed by the server')),
    );
  }

  static connect(options: ConnectOptions): Promise<BenchClient> {
    const { host = '127.0.0.1', port, timeoutMs = 30_000 } = options;
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port });
      socket.once('connect', () =>
        resolve(new BenchClient(socket, timeoutMs)),
      );
      socket.once('error', (err) =>
        reject(new ConnectionClosedError(`connect failed: ${err.message}`)),
      );
    });
  }

  private nextLine(): Promise<string> {
    const queued = this.lines.shift();
    if (queued !== undefined) return Promise.resolve(queued);
    if (this.closed) return Promise.reject(this.closed);
    if (this.waiter) {
      return Promise.reject(
        new ProtocolViolationError('overlapping reads on one session'),
      );
    }
    return new Promise<string>((resolve, reject) => {
      const timer = setTimeout(() => {
        this.waiter = null;
        reject(new CommandTimeoutError(`no reply within ${this.timeoutMs} ms`));
      }, this.timeoutMs);
      this.waiter = {
        resolve: (line) => {
          clearTimeout(timer);
          resolve(line);
        },
        reject: (err) => {
          clearTimeout(timer);
          reject(err);
        },
      };
    });
  }

  /**
   * Send one command and return its parsed reply.
   *
   * Arguments are joined with single spaces; none may contain a newline.
   * Server failures reject with the typed error for their wire code.
   */
  command(verb: string, ...args: Array<string | number>): Promise<Reply> {
    const words = [verb, ...args.map(String)];
    for (const word of words) {
      if (/[\r\n]/.test(word)) {
        throw new ProtocolViolationError(
          `command words must not contain line breaks: ${JSON.stringify(word)}`,
        );
      }
    }
    const line = words.join(' ');
    const run = async (): Promise<Reply> => {
      if (this.closed) throw this.closed;
      this.socket.write(line + '\n');
      return readReply(
        () => this.nextLine(),
        expectsBlock(verb, args.map(String)),
      );
    };
    // Serialize: a command only starts once the previous reply is in,
    // whether it succeeded or failed.
    const result = this.chain.then(run, run);
    this.chain = result.catch(() => undefined);
    return result;
  }

  close(): void {
    if (!this.closed) {
      this.closed = new ConnectionClosedError('session closed locally');
    }
    this.socket.destroy();
  }
}
