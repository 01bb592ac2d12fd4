/* tslint:disable */
/* eslint-disable */

/**
 * Flat `[x, psi, expected_return, variance, risk, w_1..w_N]` rows.
 */
export function frontier(mu: Float64Array, cov: Float64Array, nu: number, measure: string, x_from: number, x_to: number, points: number): Float64Array;

/**
 * Flat `[x, psi_var, psi_cvar]` rows.
 */
export function loss_curves(nu: number, x_from: number, x_to: number, points: number): Float64Array;

/**
 * `psi(u)` for degrees of freedom `nu` (`Infinity` for Gaussian) and
 * measure `"var"` or `"cvar"`.
 */
export function multiplier(nu: number, measure: string, u: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly frontier: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
    readonly loss_curves: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly multiplier: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
