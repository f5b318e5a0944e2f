/* tslint:disable */
/* eslint-disable */

/**
 * Particle filter against the Kalman filter on one simulated data set.
 */
export class FilterComparison {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    ess: Float64Array;
    kalman_loglik: number;
    kalman_mean: Float64Array;
    kalman_sd: Float64Array;
    observations: Float64Array;
    particle_loglik: number;
    particle_mean: Float64Array;
    particle_sd: Float64Array;
    states: Float64Array;
}

/**
 * Exact posterior of `(rho, sigma2)` on a grid, with `tau2` held at its
 * true value and inverse-gamma(1, 1) / uniform priors.
 */
export class PosteriorGrid {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    rho_marginal: Float64Array;
    rho_mean: number;
    rho: Float64Array;
    sigma2_marginal: Float64Array;
    sigma2_mean: number;
    sigma2: Float64Array;
    /**
     * Normalised weights, row-major with `sigma2` varying fastest.
     */
    weights: Float64Array;
}

/**
 * Spread of the smoothed sum of `x_{k-1} x_k` across replicates, for the
 * path-space and forward-only smoothers, on a common data set.
 */
export class SmoothingStudy {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    exact: Float64Array;
    forward_bias: Float64Array;
    forward_var: Float64Array;
    pathspace_bias: Float64Array;
    /**
     * `var(S_n) / n` across replicates.
     */
    pathspace_var: Float64Array;
    times: Float64Array;
}

export function compareFilter(rho: number, tau2: number, sigma2: number, horizon: number, particles: number, seed: bigint): FilterComparison;

export function posteriorGrid(rho: number, tau2: number, sigma2: number, horizon: number, points: number, seed: bigint): PosteriorGrid;

export function smoothingVariance(rho: number, tau2: number, sigma2: number, horizon: number, particles: number, replicates: number, points: number, seed: bigint): SmoothingStudy;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_filtercomparison_free: (a: number, b: number) => void;
    readonly __wbg_get_filtercomparison_ess: (a: number) => [number, number];
    readonly __wbg_get_filtercomparison_kalman_loglik: (a: number) => number;
    readonly __wbg_get_filtercomparison_kalman_mean: (a: number) => [number, number];
    readonly __wbg_get_filtercomparison_kalman_sd: (a: number) => [number, number];
    readonly __wbg_get_filtercomparison_observations: (a: number) => [number, number];
    readonly __wbg_get_filtercomparison_particle_loglik: (a: number) => number;
    readonly __wbg_get_filtercomparison_particle_mean: (a: number) => [number, number];
    readonly __wbg_get_filtercomparison_particle_sd: (a: number) => [number, number];
    readonly __wbg_get_filtercomparison_states: (a: number) => [number, number];
    readonly __wbg_get_posteriorgrid_rho: (a: number) => [number, number];
    readonly __wbg_get_posteriorgrid_rho_marginal: (a: number) => [number, number];
    readonly __wbg_get_posteriorgrid_rho_mean: (a: number) => number;
    readonly __wbg_get_posteriorgrid_sigma2: (a: number) => [number, number];
    readonly __wbg_get_posteriorgrid_sigma2_marginal: (a: number) => [number, number];
    readonly __wbg_get_posteriorgrid_sigma2_mean: (a: number) => number;
    readonly __wbg_get_posteriorgrid_weights: (a: number) => [number, number];
    readonly __wbg_get_smoothingstudy_exact: (a: number) => [number, number];
    readonly __wbg_get_smoothingstudy_forward_bias: (a: number) => [number, number];
    readonly __wbg_get_smoothingstudy_forward_var: (a: number) => [number, number];
    readonly __wbg_get_smoothingstudy_pathspace_bias: (a: number) => [number, number];
    readonly __wbg_get_smoothingstudy_pathspace_var: (a: number) => [number, number];
    readonly __wbg_get_smoothingstudy_times: (a: number) => [number, number];
    readonly __wbg_posteriorgrid_free: (a: number, b: number) => void;
    readonly __wbg_set_filtercomparison_ess: (a: number, b: number, c: number) => void;
    readonly __wbg_set_filtercomparison_kalman_loglik: (a: number, b: number) => void;
    readonly __wbg_set_filtercomparison_kalman_mean: (a: number, b: number, c: number) => void;
    readonly __wbg_set_filtercomparison_kalman_sd: (a: number, b: number, c: number) => void;
    readonly __wbg_set_filtercomparison_observations: (a: number, b: number, c: number) => void;
    readonly __wbg_set_filtercomparison_particle_loglik: (a: number, b: number) => void;
    readonly __wbg_set_filtercomparison_particle_mean: (a: number, b: number, c: number) => void;
    readonly __wbg_set_filtercomparison_particle_sd: (a: number, b: number, c: number) => void;
    readonly __wbg_set_filtercomparison_states: (a: number, b: number, c: number) => void;
    readonly __wbg_set_posteriorgrid_rho: (a: number, b: number, c: number) => void;
    readonly __wbg_set_posteriorgrid_rho_marginal: (a: number, b: number, c: number) => void;
    readonly __wbg_set_posteriorgrid_rho_mean: (a: number, b: number) => void;
    readonly __wbg_set_posteriorgrid_sigma2: (a: number, b: number, c: number) => void;
    readonly __wbg_set_posteriorgrid_sigma2_marginal: (a: number, b: number, c: number) => void;
    readonly __wbg_set_posteriorgrid_sigma2_mean: (a: number, b: number) => void;
    readonly __wbg_set_posteriorgrid_weights: (a: number, b: number, c: number) => void;
    readonly __wbg_set_smoothingstudy_exact: (a: number, b: number, c: number) => void;
    readonly __wbg_set_smoothingstudy_forward_bias: (a: number, b: number, c: number) => void;
    readonly __wbg_set_smoothingstudy_forward_var: (a: number, b: number, c: number) => void;
    readonly __wbg_set_smoothingstudy_pathspace_bias: (a: number, b: number, c: number) => void;
    readonly __wbg_set_smoothingstudy_pathspace_var: (a: number, b: number, c: number) => void;
    readonly __wbg_set_smoothingstudy_times: (a: number, b: number, c: number) => void;
    readonly __wbg_smoothingstudy_free: (a: number, b: number) => void;
    readonly compareFilter: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
    readonly posteriorGrid: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
    readonly smoothingVariance: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: bigint) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
