//! WebAssembly bindings for the browser demo in `www/`.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js_err(e: vaxcontract::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Paths(demo::PathComparison);

#[wasm_bindgen]
impl Paths {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn constant(&self) -> Vec<f64> {
        self.0.constant.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn declining(&self) -> Vec<f64> {
        self.0.declining.clone()
    }

    /// `[constant, declining]`
    #[wasm_bindgen(getter, js_name = adjustmentCost)]
    pub fn adjustment_cost(&self) -> Vec<f64> {
        self.0.adjustment_cost.to_vec()
    }

    /// `[constant, declining]`
    #[wasm_bindgen(getter, js_name = meanDelay)]
    pub fn mean_delay(&self) -> Vec<f64> {
        self.0.mean_delay.to_vec()
    }
}

#[wasm_bindgen]
pub struct Curve(demo::CostCurve);

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn horizons(&self) -> Vec<f64> {
        self.0.horizons.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn adjustment(&self) -> Vec<f64> {
        self.0.adjustment.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn opportunity(&self) -> Vec<f64> {
        self.0.opportunity.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn total(&self) -> Vec<f64> {
        self.0.total.clone()
    }

    #[wasm_bindgen(getter, js_name = optimalHorizon)]
    pub fn optimal_horizon(&self) -> f64 {
        self.0.optimal_horizon
    }

    #[wasm_bindgen(getter, js_name = optimalCost)]
    pub fn optimal_cost(&self) -> f64 {
        self.0.optimal_cost
    }
}

#[wasm_bindgen]
pub struct Check(demo::SolverCheck);

#[wasm_bindgen]
impl Check {
    #[wasm_bindgen(getter)]
    pub fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn analytic(&self) -> Vec<f64> {
        self.0.analytic.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn numeric(&self) -> Vec<f64> {
        self.0.numeric.clone()
    }

    #[wasm_bindgen(getter, js_name = maxError)]
    pub fn max_error(&self) -> f64 {
        self.0.max_error
    }

    #[wasm_bindgen(getter, js_name = residual)]
    pub fn euler_lagrange_residual(&self) -> f64 {
        self.0.euler_lagrange_residual
    }
}

#[wasm_bindgen(js_name = comparePaths)]
pub fn compare_paths(z: f64, t: f64, a: f64, k: f64, samples: usize) -> Result<Paths, JsError> {
    demo::compare_paths(z, t, a, k, samples).map(Paths).map_err(js_err)
}

#[wasm_bindgen(js_name = costCurve)]
pub fn cost_curve(z: f64, a: f64, k: f64, max_horizon: f64, samples: usize) -> Result<Curve, JsError> {
    demo::cost_curve(z, a, k, max_horizon, samples).map(Curve).map_err(js_err)
}

#[wasm_bindgen(js_name = checkSolver)]
pub fn check_solver(z: f64, t: f64, a: f64, k: f64, n: usize) -> Result<Check, JsError> {
    demo::check_solver(z, t, a, k, n).map(Check).map_err(js_err)
}
