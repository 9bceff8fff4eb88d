/* tslint:disable */
/* eslint-disable */

/**
 * Linear and exact bus withdrawals of a delta load.
 *
 * `sd` holds the branch powers as `[p_ab, p_bc, p_ca, q_ab, q_bc, q_ca]`.
 * The bus voltage is the balanced set with phases b and c rotated by the
 * given angles (degrees). Returns `[linear(6), exact(6), vuf_pct]` in the
 * same re/im layout.
 */
export function delta_mapping(sd: Float64Array, theta_b_deg: number, theta_c_deg: number): Float64Array;

/**
 * Solve the bundled eight-bus feeder with both the linear and the exact
 * model after setting every load exponent to `alpha`, scaling the source
 * by `m` and unbalancing it to `vuf_pct`.
 *
 * Returns JSON with per-bus-phase labels, `|V|²` from each model, the two
 * objectives and the error metrics, or an `error` field when the exact
 * model fails.
 */
export function feeder_profile(alpha: number, m: number, vuf_pct: number, seed: number): string;

/**
 * Exact and tangent-line power of a single-phase exponential load over
 * `n` voltage magnitudes in `[vmin, vmax]`.
 *
 * Returns rows of `[|V|, p_exact, q_exact, p_linear, q_linear]`, flattened.
 */
export function load_curve(p0: number, q0: number, alpha: number, beta: number, vmin: number, vmax: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly delta_mapping: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly feeder_profile: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly load_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
