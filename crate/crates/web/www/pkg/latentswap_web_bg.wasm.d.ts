/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_trainingdemo_free: (a: number, b: number) => void;
export const entropy_envelope: (a: number) => [number, number];
export const grid_side: (a: number) => number;
export const noise_curve: (a: number, b: number) => [number, number, number, number];
export const trainingdemo_new: (a: number, b: number) => [number, number, number];
export const trainingdemo_score: (a: number) => [number, number, number, number];
export const trainingdemo_step: (a: number, b: number) => [number, number, number, number];
export const transfer_grid: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
