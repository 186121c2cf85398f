/* tslint:disable */
/* eslint-disable */

/**
 * `p(0) .. p(n_cut - 1)` after the channel.
 */
export function photonNumbers(state_kind: string, n: number, m: number, z_re: number, z_im: number, nbar: number, channel_kind: string, kappa: number, g: number, bath_nbar: number, t: number, n_cut: number): Float64Array;

/**
 * `κ t_c` for a bath with mean occupation `nbar`.
 */
export function positivityTime(nbar: number): number;

/**
 * Wigner function of the chosen state after the channel, sampled on an
 * `n × n` grid; row-major, `y` outer.
 */
export function wignerGrid(state_kind: string, n: number, m: number, z_re: number, z_im: number, nbar: number, channel_kind: string, kappa: number, g: number, bath_nbar: number, t: number, half: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly photonNumbers: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number, l: number, m: number, n: number) => [number, number, number, number];
    readonly positivityTime: (a: number) => [number, number, number];
    readonly wignerGrid: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number, l: number, m: number, n: number, o: number) => [number, number, number, number];
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
