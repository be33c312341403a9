/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_heatmap_free: (a: number, b: number) => void;
export const heatmap_height: (a: number) => number;
export const heatmap_rgba: (a: number) => [number, number];
export const heatmap_triageJson: (a: number) => [number, number];
export const heatmap_width: (a: number) => number;
export const renderStudy: (a: number, b: number, c: number) => [number, number, number];
export const rocExplorer: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const triageCohort: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
