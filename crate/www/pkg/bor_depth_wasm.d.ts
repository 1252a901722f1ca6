/* tslint:disable */
/* eslint-disable */

/**
 * `BoR_max` in bits for depths `1..=max_depth`.
 */
export function ceilingCurve(corpus_size: number, relevant: number, max_depth: number): Float64Array;

/**
 * BoR of a selector with success rate `found_rate` at a fixed depth.
 */
export function shortlistBits(corpus_size: number, relevant: number, depth: number, found_rate: number): number;

/**
 * Trains and evaluates the standard methods on a synthetic benchmark.
 * Returns the summary as a JSON string.
 */
export function simulate(preset: string, data_seed: number, num_queries: number, epochs: number): string;

/**
 * Discounted return of stopping at each depth `1..=max_depth` when the
 * gold tool sits at `gold_rank` (0 = not in the list).
 */
export function stopReturns(reward_kind: string, corpus_size: number, gold_rank: number, max_depth: number, step_cost: number, gamma: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ceilingCurve: (a: number, b: number, c: number) => [number, number, number, number];
    readonly shortlistBits: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly simulate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly stopReturns: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
