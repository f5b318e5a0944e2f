/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_filtercomparison_free: (a: number, b: number) => void;
export const __wbg_get_filtercomparison_ess: (a: number) => [number, number];
export const __wbg_get_filtercomparison_kalman_loglik: (a: number) => number;
export const __wbg_get_filtercomparison_kalman_mean: (a: number) => [number, number];
export const __wbg_get_filtercomparison_kalman_sd: (a: number) => [number, number];
export const __wbg_get_filtercomparison_observations: (a: number) => [number, number];
export const __wbg_get_filtercomparison_particle_loglik: (a: number) => number;
export const __wbg_get_filtercomparison_particle_mean: (a: number) => [number, number];
export const __wbg_get_filtercomparison_particle_sd: (a: number) => [number, number];
export const __wbg_get_filtercomparison_states: (a: number) => [number, number];
export const __wbg_get_posteriorgrid_rho: (a: number) => [number, number];
export const __wbg_get_posteriorgrid_rho_marginal: (a: number) => [number, number];
export const __wbg_get_posteriorgrid_rho_mean: (a: number) => number;
export const __wbg_get_posteriorgrid_sigma2: (a: number) => [number, number];
export const __wbg_get_posteriorgrid_sigma2_marginal: (a: number) => [number, number];
export const __wbg_get_posteriorgrid_sigma2_mean: (a: number) => number;
export const __wbg_get_posteriorgrid_weights: (a: number) => [number, number];
export const __wbg_get_smoothingstudy_exact: (a: number) => [number, number];
export const __wbg_get_smoothingstudy_forward_bias: (a: number) => [number, number];
export const __wbg_get_smoothingstudy_forward_var: (a: number) => [number, number];
export const __wbg_get_smoothingstudy_pathspace_bias: (a: number) => [number, number];
export const __wbg_get_smoothingstudy_pathspace_var: (a: number) => [number, number];
export const __wbg_get_smoothingstudy_times: (a: number) => [number, number];
export const __wbg_posteriorgrid_free: (a: number, b: number) => void;
export const __wbg_set_filtercomparison_ess: (a: number, b: number, c: number) => void;
export const __wbg_set_filtercomparison_kalman_loglik: (a: number, b: number) => void;
export const __wbg_set_filtercomparison_kalman_mean: (a: number, b: number, c: number) => void;
export const __wbg_set_filtercomparison_kalman_sd: (a: number, b: number, c: number) => void;
export const __wbg_set_filtercomparison_observations: (a: number, b: number, c: number) => void;
export const __wbg_set_filtercomparison_particle_loglik: (a: number, b: number) => void;
export const __wbg_set_filtercomparison_particle_mean: (a: number, b: number, c: number) => void;
export const __wbg_set_filtercomparison_particle_sd: (a: number, b: number, c: number) => void;
export const __wbg_set_filtercomparison_states: (a: number, b: number, c: number) => void;
export const __wbg_set_posteriorgrid_rho: (a: number, b: number, c: number) => void;
export const __wbg_set_posteriorgrid_rho_marginal: (a: number, b: number, c: number) => void;
export const __wbg_set_posteriorgrid_rho_mean: (a: number, b: number) => void;
export const __wbg_set_posteriorgrid_sigma2: (a: number, b: number, c: number) => void;
export const __wbg_set_posteriorgrid_sigma2_marginal: (a: number, b: number, c: number) => void;
export const __wbg_set_posteriorgrid_sigma2_mean: (a: number, b: number) => void;
export const __wbg_set_posteriorgrid_weights: (a: number, b: number, c: number) => void;
export const __wbg_set_smoothingstudy_exact: (a: number, b: number, c: number) => void;
export const __wbg_set_smoothingstudy_forward_bias: (a: number, b: number, c: number) => void;
export const __wbg_set_smoothingstudy_forward_var: (a: number, b: number, c: number) => void;
export const __wbg_set_smoothingstudy_pathspace_bias: (a: number, b: number, c: number) => void;
export const __wbg_set_smoothingstudy_pathspace_var: (a: number, b: number, c: number) => void;
export const __wbg_set_smoothingstudy_times: (a: number, b: number, c: number) => void;
export const __wbg_smoothingstudy_free: (a: number, b: number) => void;
export const compareFilter: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
export const posteriorGrid: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
export const smoothingVariance: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: bigint) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
