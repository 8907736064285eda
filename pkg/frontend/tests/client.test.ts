import * as net from 'node:net';

import { afterEach, describe, expect, it } from 'vitest';

import { BenchClient } from '../src/client.js';
import {
  AddressError,
  CommandTimeoutError,
  ConnectionClosedError,
  InternalError,
  IoError,
  ModeError,
  OutOfRangeError,
  ParseError,
  ProtocolViolationError,
  ServerError,
  StateError,
} from '../src/errors.js';

/**
 * Scripted stand-in for the bench server: each received command line is
 * answered by the test-supplied handler, which writes raw reply bytes (or
 * drops the connection) however the scenario demands.
 */
interface FakeServer {
  port: number;
  received: string[];
  close(): Promise<void>;
}

async function startFakeServer(
  handle: (line: string, socket: net.Socket, received: string[]) => void,
): Promise<FakeServer> {
  const received: string[] = [];
  const sockets = new Set<net.Socket>();
  const server = net.createServer((socket) => {
    sockets.add(socket);
    socket.setEncoding('utf8');
    let pending = '';
    socket.on('data', (chunk: string) => {
      pending += chunk;
      const lines = pending.split('\n');
      pending = lines.pop() ?? '';
      for (const line of lines) {
        received.push(line);
        handle(line, socket, received);
      }
    });
    socket.on('error', () => undefined);
    socket.on('close', () => sockets.delete(socket));
  });
  await new Promise<void>((resolve) => server.listen(0, '127.0.0.1', resolve));
  const { port } = server.address() as net.AddressInfo;
  return {
    port,
    received,
    close: () =>
      new Promise((resolve) => {
        for (const socket of sockets) socket.destroy();
        server.close(() => resolve());
      }),
  };
}

const cleanups: Array<() => void | Promise<void>> = [];

afterEach(async () => {
  while (cleanups.length) await cleanups.pop()!();
});

async function connectTo(
  server: FakeServer,
  timeoutMs?: number,
): Promise<BenchClient> {
  const client = await BenchClient.connect({ port: server.port, timeoutMs });
  cleanups.push(() => client.close());
  cleanups.push(() => server.close());
  return client;
}

describe('BenchClient against a scripted server', () => {
  it('resolves single-line replies', async () => {
    const server = await startFakeServer((line, socket) => {
      if (line === 'PING') socket.write('OK pong\n');
      else socket.write('OK\n');
    });
    const client = await connectTo(server);
    await expect(client.command('PING')).resolves.toEqual({
      kind: 'ok',
      detail: 'pong',
    });
    await expect(client.command('FORM', 0, 0)).resolves.toEqual({
      kind: 'ok',
      detail: '',
    });
    expect(server.received).toEqual(['PING', 'FORM 0 0']);
  });

  it('resolves block replies and tolerates chunk fragmentation', async () => {
    const server = await startFakeServer((_line, socket) => {
      // Dribble the reply byte-by-byte: framing must not depend on chunking.
      const reply = 'OK\npulse_index,resistance_ohm\n0,1e4\nEND\n';
      for (const ch of reply) socket.write(ch);
    });
    const client = await connectTo(server);
    await expect(client.command('RUN', 'progressive_reset')).resolves.toEqual({
      kind: 'block',
      lines: ['pulse_index,resistance_ohm', '0,1e4'],
    });
  });

  const errorCases: Array<[string, string, new (m: string) => ServerError]> = [
    ['PARSE', 'expected two arguments', ParseError],
    ['MODE', 'not in analog mode', ModeError],
    ['ADDR', 'row 999 outside 0..63', AddressError],
    ['STATE', 'device not formed', StateError],
    ['RANGE', 'bit must be 0 or 1', OutOfRangeError],
    ['IO', 'cannot write snapshot', IoError],
    ['INTERNAL', 'invariant violated', InternalError],
  ];

  it.each(errorCases)(
    'maps ERR %s to the typed exception',
    async (code, message, cls) => {
      const server = await startFakeServer((_line, socket) => {
        socket.write(`ERR ${code} ${message}\n`);
      });
      const client = await connectTo(server);
      const err = await client.command('POKE').catch((e: unknown) => e);
      expect(err).toBeInstanceOf(cls);
      expect((err as ServerError).code).toBe(code);
      expect((err as ServerError).message).toBe(message);
    },
  );

  it('keeps the session usable after a server error', async () => {
    const server = await startFakeServer((line, socket) => {
      socket.write(line === 'PING' ? 'OK pong\n' : 'ERR RANGE nope\n');
    });
    const client = await connectTo(server);
    await expect(client.command('WRITE', 0, 0, 7)).rejects.toThrowError(
      OutOfRangeError,
    );
    await expect(client.command('PING')).resolves.toEqual({
      kind: 'ok',
      detail: 'pong',
    });
  });

  it('rejects replies outside the grammar as protocol violations', async () => {
    const server = await startFakeServer((_line, socket) => {
      socket.write('BANANA\n');
    });
    const client = await connectTo(server);
    await expect(client.command('PING')).rejects.toThrowError(
      ProtocolViolationError,
    );
  });

  it('rejects a single-line answer to a block verb', async () => {
    const server = await startFakeServer((_line, socket) => {
      socket.write('OK 42\n');
    });
    const client = await connectTo(server);
    await expect(client.command('RUN', 'endurance')).rejects.toThrowError(
      ProtocolViolationError,
    );
  });

  it('fails with ConnectionClosedError when the server drops mid-reply', async () => {
    const server = await startFakeServer((_line, socket) => {
      socket.write('OK\npartial,row\n');
      socket.end();
    });
    const client = await connectTo(server);
    await expect(client.command('RUN', 'endurance')).rejects.toThrowError(
      ConnectionClosedError,
    );
  });

  it('fails with CommandTimeoutError when no reply arrives in time', async () => {
    const server = await startFakeServer(() => {
      /* never answer */
    });
    const client = await connectTo(server, 200);
    await expect(client.command('PING')).rejects.toThrowError(
      CommandTimeoutError,
    );
  });

  it('serializes concurrent commands: one on the wire at a time', async () => {
    let firstAnswered = false;
    let overlapped = false;
    const server = await startFakeServer((line, socket) => {
      if (line === 'SLOW') {
        setTimeout(() => {
          firstAnswered = true;
          socket.write('OK slow\n');
        }, 150);
      } else {
        if (!firstAnswered) overlapped = true;
        socket.write('OK fast\n');
      }
    });
    const client = await connectTo(server);
    const [a, b] = await Promise.all([
      client.command('SLOW'),
      client.command('FAST'),
    ]);
    expect(a).toEqual({ kind: 'ok', detail: 'slow' });
    expect(b).toEqual({ kind: 'ok', detail: 'fast' });
    expect(overlapped).toBe(false);
    expect(server.received).toEqual(['SLOW', 'FAST']);
  });

  it('keeps later commands alive when an earlier one fails', async () => {
    const server = await startFakeServer((line, socket) => {
      socket.write(line === 'BAD' ? 'ERR STATE nope\n' : 'OK pong\n');
    });
    const client = await connectTo(server);
    const [bad, good] = await Promise.allSettled([
      client.command('BAD'),
      client.command('PING'),
    ]);
    expect(bad.status).toBe('rejected');
    expect(good).toEqual({
      status: 'fulfilled',
      value: { kind: 'ok', detail: 'pong' },
    });
  });

  it('refuses to send words containing line breaks', async () => {
    const server = await startFakeServer((_line, socket) => {
      socket.write('OK\n');
    });
    const client = await connectTo(server);
    expect(() => client.command('PING', 'a\nb')).toThrowError(
      ProtocolViolationError,
    );
    expect(() => client.command('PING\rPONG')).toThrowError(
      ProtocolViolationError,
    );
    expect(server.received).toEqual([]);
  });

  it('rejects commands after close() without touching the socket', async () => {
    const server = await startFakeServer((_line, socket) => {
      socket.write('OK\n');
    });
    const client = await connectTo(server);
    client.close();
    await expect(client.command('PING')).rejects.toThrowError(
      ConnectionClosedError,
    );
  });

  it('rejects connect() against a dead port', async () => {
    const server = await startFakeServer(() => undefined);
    const deadPort = server.port;
    await server.close();
    await expect(
      BenchClient.connect({ port: deadPort, timeoutMs: 500 }),
    ).rejects.toThrowError(ConnectionClosedError);
  });
});
