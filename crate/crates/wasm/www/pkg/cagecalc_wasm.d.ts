/* tslint:disable */
/* eslint-disable */

/**
 * Far-field constants of one periodic cell, as JSON.
 */
export function cell_constants(shape: string, delta: number): string;

/**
 * |φ| of the discrete solution on an n×n grid over [-half, half]², row by
 * row from the top; NaN inside wires. The source sits at (x0, 0).
 */
export function field_image(m: number, delta: number, k: number, x0: number, half: number, n: number): Float32Array;

/**
 * Discrete |φ(0)| at `count` wavenumbers in [k_lo, k_hi], with the
 * resonance prediction for the circular mode nearest the window centre.
 */
export function k_sweep(m: number, delta: number, x0: number, k_lo: number, k_hi: number, count: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cell_constants: (a: number, b: number, c: number) => [number, number, number, number];
    readonly field_image: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly k_sweep: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
