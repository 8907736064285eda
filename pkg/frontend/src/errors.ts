/**
 * Typed errors for the bench protocol.
 *
 * Every `ERR <CODE> <message>` reply from the server maps to one error
 * class below, so callers can catch by failure kind instead of string
 * matching.  Client-side failures (bad framing, dropped connections,
 * timeouts) get their own classes and never masquerade as server errors.
 */

export type WireCode =
  | 'PARSE'
  | 'MODE'
  | 'ADDR'
  | 'STATE'
  | 'RANGE'
  | 'IO'
  | 'INTERNAL';

/** Base class for every error raised by this package. */
export class BenchError extends Error {
  constructor(message: string) {
    super(message);
    this.name = new.target.name;
  }
}

/** An `ERR` reply from the server; `code` is the wire code verbatim. */
export class ServerError extends BenchError {
  constructor(
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

/** ERR PARSE: the server could not parse the command line. */
export class ParseError extends ServerError {
  constructor(message: string) {
    super('PARSE', message);
  }
}

/** ERR MODE: command illegal in the chip's current operating mode. */
export class ModeError extends ServerError {
  constructor(message: string) {
    super('MODE', message);
  }
}

/** ERR ADDR: cell address outside the array geometry. */
export class AddressError extends ServerError {
  constructor(message: string) {
    super('ADDR', message);
  }
}

/** ERR STATE: operation illegal in the current device/routing state. */
export class StateError extends ServerError {
  constructor(message: string) {
    super('STATE', message);
  }
}

/** ERR RANGE: a parameter value is outside its legal domain. */
export class OutOfRangeError extends ServerError {
  constructor(message: string) {
    super('RANGE', message);
  }
}

/** ERR IO: file-system failure on the server side. */
export class IoError extends ServerError {
  constructor(message: string) {
    super('IO', message);
  }
}

/** ERR INTERNAL: simulator invariant violation or unexpected fault. */
export class InternalError extends ServerError {
  constructor(message: string) {
    super('INTERNAL', message);
  }
}

/** The server sent something outside the documented reply grammar. */
export class ProtocolViolationError extends BenchError {}

/** The connection dropped while a reply was outstanding. */
export class ConnectionClosedError extends BenchError {}

/** No reply within the configured deadline. */
export class CommandTimeoutError extends BenchError {}

const ERROR_BY_CODE: Record<WireCode, new (message: string) => ServerError> = {
  PARSE: ParseError,
  MODE: ModeError,
  ADDR: AddressError,
  STATE: StateError,
  RANGE: OutOfRangeError,
  IO: IoError,
  INTERNAL: InternalError,
};

/** Build the typed error for one wire code (unknown codes stay generic). */
export function errorForCode(code: string, message: string): ServerError {
  const cls = (ERROR_BY_CODE as Record<string, new (m: string) => ServerError>)[
    code
  ];
  return cls ? new cls(message) : new ServerError(code, message);
}
