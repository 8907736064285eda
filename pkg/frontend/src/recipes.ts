/**
 * Experiment recipes: thin wrappers over the protocol's RUN verb.
 *
 * The server spins a fresh simulator from (session configuration, seed),
 * exactly like the offline CLI — given the same seed and configuration the
 * returned table is byte-identical to the CLI's results.csv.  The client
 * computes no device physics.
 */

import { BenchClient } from './client.js';
import { parseCsv, type Table } from './csv.js';
import { blockText, type BlockReply } from './protocol.js';
import { ProtocolViolationError } from './errors.js';

export interface RunOptions {
  seed?: number;
  /** Experiment knobs, passed through as `key=value` words. */
  knobs?: Record<string, string | number>;
}

export interface RunResult {
  /** Raw CSV exactly as the server sent it (newline-terminated). */
  raw: string;
  table: Table;
}

export async function runExperiment(
  client: BenchClient,
  name: string,
  options: RunOptions = {},
): Promise<RunResult> {
  const args: string[] = [name];
  if (options.seed !== undefined) args.push(`seed=${options.seed}`);
  for (const [key, value] of Object.entries(options.knobs ?? {})) {
    args.push(`${key}=${value}`);
  }
  const reply = await client.command('RUN', ...args);
  if (reply.kind !== 'block') {
    throw new ProtocolViolationError('RUN must answer with a block reply');
  }
  const raw = blockText(reply as BlockReply);
  return { raw, table: parseCsv(raw) };
}

/** Resistance-versus-pulse-count table (columns pulse_index, resistance_ohm). */
export function runProgressiveReset(
  client: BenchClient,
  options: RunOptions = {},
): Promise<RunResult> {
  return runExperiment(client, 'progressive_reset', options);
}

/** Cycling table (columns cycle, r_lrs_ohm, r_hrs_ohm, ber). */
export function runEndurance(
  client: BenchClient,
  options: RunOptions = {},
): Promise<RunResult> {
  return runExperiment(client, 'endurance', options);
}
