/* @ts-self-types="./sspe_demo_wasm.d.ts" */

/**
 * Particle filter against the Kalman filter on one simulated data set.
 */
export class FilterComparison {
    static __wrap(ptr) {
        const obj = Object.create(FilterComparison.prototype);
        obj.__wbg_ptr = ptr;
        FilterComparisonFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        FilterComparisonFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_filtercomparison_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get ess() {
        const ret = wasm.__wbg_get_filtercomparison_ess(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get kalman_loglik() {
        const ret = wasm.__wbg_get_filtercomparison_kalman_loglik(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get kalman_mean() {
        const ret = wasm.__wbg_get_filtercomparison_kalman_mean(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get kalman_sd() {
        const ret = wasm.__wbg_get_filtercomparison_kalman_sd(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get observations() {
        const ret = wasm.__wbg_get_filtercomparison_observations(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get particle_loglik() {
        const ret = wasm.__wbg_get_filtercomparison_particle_loglik(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get particle_mean() {
        const ret = wasm.__wbg_get_filtercomparison_particle_mean(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get particle_sd() {
        const ret = wasm.__wbg_get_filtercomparison_particle_sd(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get states() {
        const ret = wasm.__wbg_get_filtercomparison_states(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {Float64Array} arg0
     */
    set ess(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_filtercomparison_ess(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set kalman_loglik(arg0) {
        wasm.__wbg_set_filtercomparison_kalman_loglik(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set kalman_mean(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_filtercomparison_kalman_mean(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set kalman_sd(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_filtercomparison_kalman_sd(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set observations(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_filtercomparison_observations(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set particle_loglik(arg0) {
        wasm.__wbg_set_filtercomparison_particle_loglik(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set particle_mean(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_filtercomparison_particle_mean(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set particle_sd(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_filtercomparison_particle_sd(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set states(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_filtercomparison_states(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) FilterComparison.prototype[Symbol.dispose] = FilterComparison.prototype.free;

/**
 * Exact posterior of `(rho, sigma2)` on a grid, with `tau2` held at its
 * true value and inverse-gamma(1, 1) / uniform priors.
 */
export class PosteriorGrid {
    static __wrap(ptr) {
        const obj = Object.create(PosteriorGrid.prototype);
        obj.__wbg_ptr = ptr;
        PosteriorGridFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        PosteriorGridFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_posteriorgrid_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get rho_marginal() {
        const ret = wasm.__wbg_get_posteriorgrid_rho_marginal(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get rho_mean() {
        const ret = wasm.__wbg_get_posteriorgrid_rho_mean(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get rho() {
        const ret = wasm.__wbg_get_posteriorgrid_rho(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get sigma2_marginal() {
        const ret = wasm.__wbg_get_posteriorgrid_sigma2_marginal(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get sigma2_mean() {
        const ret = wasm.__wbg_get_posteriorgrid_sigma2_mean(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get sigma2() {
        const ret = wasm.__wbg_get_posteriorgrid_sigma2(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Normalised weights, row-major with `sigma2` varying fastest.
     * @returns {Float64Array}
     */
    get weights() {
        const ret = wasm.__wbg_get_posteriorgrid_weights(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {Float64Array} arg0
     */
    set rho_marginal(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_posteriorgrid_rho_marginal(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set rho_mean(arg0) {
        wasm.__wbg_set_posteriorgrid_rho_mean(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set rho(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_posteriorgrid_rho(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set sigma2_marginal(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_posteriorgrid_sigma2_marginal(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set sigma2_mean(arg0) {
        wasm.__wbg_set_posteriorgrid_sigma2_mean(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set sigma2(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_posteriorgrid_sigma2(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * Normalised weights, row-major with `sigma2` varying fastest.
     * @param {Float64Array} arg0
     */
    set weights(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_posteriorgrid_weights(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) PosteriorGrid.prototype[Symbol.dispose] = PosteriorGrid.prototype.free;

/**
 * Spread of the smoothed sum of `x_{k-1} x_k` across replicates, for the
 * path-space and forward-only smoothers, on a common data set.
 */
export class SmoothingStudy {
    static __wrap(ptr) {
        const obj = Object.create(SmoothingStudy.prototype);
        obj.__wbg_ptr = ptr;
        SmoothingStudyFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SmoothingStudyFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_smoothingstudy_free(ptr, 0);
    }
    /**
     * @returns {Float64Array}
     */
    get exact() {
        const ret = wasm.__wbg_get_smoothingstudy_exact(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get forward_bias() {
        const ret = wasm.__wbg_get_smoothingstudy_forward_bias(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get forward_var() {
        const ret = wasm.__wbg_get_smoothingstudy_forward_var(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get pathspace_bias() {
        const ret = wasm.__wbg_get_smoothingstudy_pathspace_bias(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * `var(S_n) / n` across replicates.
     * @returns {Float64Array}
     */
    get pathspace_var() {
        const ret = wasm.__wbg_get_smoothingstudy_pathspace_var(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get times() {
        const ret = wasm.__wbg_get_smoothingstudy_times(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {Float64Array} arg0
     */
    set exact(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_smoothingstudy_exact(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set forward_bias(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_smoothingstudy_forward_bias(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set forward_var(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_smoothingstudy_forward_var(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set pathspace_bias(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_smoothingstudy_pathspace_bias(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * `var(S_n) / n` across replicates.
     * @param {Float64Array} arg0
     */
    set pathspace_var(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_smoothingstudy_pathspace_var(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set times(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_smoothingstudy_times(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) SmoothingStudy.prototype[Symbol.dispose] = SmoothingStudy.prototype.free;

/**
 * @param {number} rho
 * @param {number} tau2
 * @param {number} sigma2
 * @param {number} horizon
 * @param {number} particles
 * @param {bigint} seed
 * @returns {FilterComparison}
 */
export function compareFilter(rho, tau2, sigma2, horizon, particles, seed) {
    const ret = wasm.compareFilter(rho, tau2, sigma2, horizon, particles, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return FilterComparison.__wrap(ret[0]);
}

/**
 * @param {number} rho
 * @param {number} tau2
 * @param {number} sigma2
 * @param {number} horizon
 * @param {number} points
 * @param {bigint} seed
 * @returns {PosteriorGrid}
 */
export function posteriorGrid(rho, tau2, sigma2, horizon, points, seed) {
    const ret = wasm.posteriorGrid(rho, tau2, sigma2, horizon, points, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return PosteriorGrid.__wrap(ret[0]);
}

/**
 * @param {number} rho
 * @param {number} tau2
 * @param {number} sigma2
 * @param {number} horizon
 * @param {number} particles
 * @param {number} replicates
 * @param {number} points
 * @param {bigint} seed
 * @returns {SmoothingStudy}
 */
export function smoothingVariance(rho, tau2, sigma2, horizon, particles, replicates, points, seed) {
    const ret = wasm.smoothingVariance(rho, tau2, sigma2, horizon, particles, replicates, points, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return SmoothingStudy.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./sspe_demo_wasm_bg.js": import0,
    };
}

const FilterComparisonFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_filtercomparison_free(ptr, 1));
const PosteriorGridFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_posteriorgrid_free(ptr, 1));
const SmoothingStudyFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_smoothingstudy_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passArrayF64ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 8, 8) >>> 0;
    getFloat64ArrayMemory0().set(arg, ptr / 8);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('sspe_demo_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
