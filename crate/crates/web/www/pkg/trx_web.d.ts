/* tslint:disable */
/* eslint-disable */

/**
 * RGBA pixels of one study's unified heatmap.
 */
export class Heatmap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Row-major RGBA8, ready for `ImageData`.
     */
    rgba(): Uint8Array;
    /**
     * The study's triage result as JSON.
     */
    triageJson(): string;
    readonly height: number;
    readonly width: number;
}

/**
 * Synthesizes one study and renders its fused heat layers.
 */
export function renderStudy(seed: number, signal: number, activation_floor: number): Heatmap;

/**
 * ROC curve, AUROC and the Youden-optimal cutpoint for one finding as JSON.
 */
export function rocExplorer(seed: number, n: number, signal: number, finding: string): string;

/**
 * Runs the OR pipeline over a synthetic cohort with the given cutpoints
 * (pneumothorax, pleural effusion, lung opacity, fracture) and returns a
 * JSON summary.
 */
export function triageCohort(seed: number, n: number, signal: number, cutpoints: Float64Array): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_heatmap_free: (a: number, b: number) => void;
    readonly heatmap_height: (a: number) => number;
    readonly heatmap_rgba: (a: number) => [number, number];
    readonly heatmap_triageJson: (a: number) => [number, number];
    readonly heatmap_width: (a: number) => number;
    readonly renderStudy: (a: number, b: number, c: number) => [number, number, number];
    readonly rocExplorer: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly triageCohort: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
