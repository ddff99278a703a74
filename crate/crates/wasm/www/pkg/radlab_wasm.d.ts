/* tslint:disable */
/* eslint-disable */

export function deficit_sweep(d: number, m: number, symmetric: boolean, eps_max: number): string;

export function eigenfunction(d: number, m: number, r_max: number, n: number): Float64Array;

export function eigenvalues(d: number, max_m: number): Float64Array;

export function sigma_curve(d: number, a0: number, a1: number, b0: number, b1: number, r_max: number, n: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly deficit_sweep: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly eigenfunction: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly eigenvalues: (a: number, b: number) => [number, number, number, number];
    readonly sigma_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
