export {
  BenchError,
  ServerError,
  ParseError,
  ModeError,
  AddressError,
  StateError,
  OutOfRangeError,
  IoError,
  InternalError,
  ProtocolViolationError,
  ConnectionClosedError,
  CommandTimeoutError,
  errorForCode,
  type WireCode,
} from './errors.js';
export {
  LineBuffer,
  blockText,
  expectsBlock,
  readReply,
  type Reply,
  type OkReply,
  type BlockReply,
} from './protocol.js';
export { BenchClient, type ConnectOptions } from './client.js';
export { parseCsv, numericColumn, type Table } from './csv.js';
export {
  runExperiment,
  runProgressiveReset,
  runEndurance,
  type RunOptions,
  type RunResult,
} from './recipes.js';
export {
  renderLinePlot,
  plotProgressiveReset,
  plotEndurance,
  savePlot,
  type Series,
  type PlotOptions,
  type Scale,
} from './plot.js';
