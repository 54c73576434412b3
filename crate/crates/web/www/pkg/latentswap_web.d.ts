/* tslint:disable */
/* eslint-disable */

/**
 * A 4+2 parameter vector world in 8 dimensions with a model small enough
 * to train interactively.
 */
export class TrainingDemo {
    free(): void;
    [Symbol.dispose](): void;
    constructor(seed: number, lambda: number);
    score(): Float64Array;
    /**
     * Runs `n` outer steps; returns `[step, L_A, L_B, L_D]` of the last.
     */
    step(n: number): Float64Array;
}

/**
 * Triples `[p, H(p), 2 ln 2 √(p(1−p))]` on `n + 1` uniform points.
 */
export function entropy_envelope(n: number): Float64Array;

export function grid_side(n: number): number;

export function noise_curve(alphas: Float64Array): Float64Array;

export function transfer_grid(seed: number, n: number): Uint8Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_trainingdemo_free: (a: number, b: number) => void;
    readonly entropy_envelope: (a: number) => [number, number];
    readonly grid_side: (a: number) => number;
    readonly noise_curve: (a: number, b: number) => [number, number, number, number];
    readonly trainingdemo_new: (a: number, b: number) => [number, number, number];
    readonly trainingdemo_score: (a: number) => [number, number, number, number];
    readonly trainingdemo_step: (a: number, b: number) => [number, number, number, number];
    readonly transfer_grid: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
