/**
 * Reply grammar for the bench protocol, transport-agnostic.
 *
 * One command line yields exactly one reply:
 *
 * - `OK` or `OK <detail>`            — single-line success
 * - `OK` / payload lines / `END`     — block success (CSV or key=value text)
 * - `ERR <CODE> <message>`           — failure, always a single line
 *
 * Whether a verb answers with a single line or a block is fixed by the
 * protocol documentation, not sniffable from the first line (both shapes
 * start with a bare `OK`), so framing is decided per command up front.
 */

import { errorForCode, ProtocolViolationError } from './errors.js';

export interface OkReply {
  kind: 'ok';
  /** Text after `OK `; empty string for a bare `OK`. */
  detail: string;
}

export interface BlockReply {
  kind: 'block';
  /** Payload lines between `OK` and `END`, without the frame. */
  lines: string[];
}

export type Reply = OkReply | BlockReply;

/** Block payload as raw text, newline-terminated like the server's CSV. */
export function blockText(reply: BlockReply): string {
  return reply.lines.length ? reply.lines.join('\n') + '\n' : '';
}

/** Does this command expect a block reply? Mirrors the protocol docs. */
export function expectsBlock(verb: string, args: readonly string[]): boolean {
  if (verb === 'WAVE' || verb === 'RUN') return true;
  return verb === 'PARAMS' && args[0] === 'DUMP';
}

/** Split a stream of socket chunks into complete lines. */
export class LineBuffer {
  private pending = '';

  /** Feed one chunk; returns every line completed by it (no terminators). */
  push(chunk: string): string[] {
    this.pending += chunk;
    const lines = this.pending.split('\n');
    this.pending = lines.pop() ?? '';
    return lines.map((line) =>
      line.endsWith('\r') ? line.slice(0, -1) : line,
    );
  }

  /** Unterminated trailing text (non-empty means the peer stopped mid-line). */
  get rest(): string {
    return this.pending;
  }
}

/**
 * Parse one reply from a line source.
 *
 * `nextLine` must resolve with consecutive reply lines.  Throws the typed
 * server error for `ERR` replies and `ProtocolViolationError` for anything
 * outside the grammar.
 */
export async function readReply(
  nextLine: () => Promise<string>,
  block: boolean,
): Promise<Reply> {
  const first = await nextLine();
  if (first.startsWith('ERR ')) {
    const body = first.slice(4);
    const space = body.indexOf(' ');
    const code = space === -1 ? body : body.slice(0, space);
    const message = space === -1 ? '' : body.slice(space + 1);
    if (!/^[A-Z]+$/.test(code)) {
      throw new ProtocolViolationError(`malformed error reply: ${first}`);
    }
    throw errorForCode(code, message);
  }
  if (first === 'OK' || first.startsWith('OK ')) {
    if (!block) {
      return { kind: 'ok', detail: first === 'OK' ? '' : first.slice(3) };
    }
    if (first !== 'OK') {
      throw new ProtocolViolationError(
        `expected a block reply, got single-line: ${first}`,
      );
    }
    const lines: string[] = [];
    for (;;) {
      const line = await nextLine();
      if (line === 'END') return { kind: 'block', lines };
      lines.push(line);
    }
  }
  throw new ProtocolViolationError(`unrecognized reply line: ${first}`);
}
