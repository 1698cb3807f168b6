//! Browser bindings for three interactive views: reflected pulse shapes of a
//! two-atom register, photon loss against coupling rate, and the reflection
//! spectrum of the cavity. The computations live in [`demo`] so they can be
//! tested without a browser.

use wasm_bindgen::prelude::*;

pub mod demo;

fn js_err(e: cqed_gates::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Reflected shapes for `|00⟩, |01⟩, |10⟩, |11⟩`.
#[wasm_bindgen]
pub struct Shapes(demo::Shapes);

#[wasm_bindgen]
impl Shapes {
    pub fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    pub fn input(&self) -> Vec<f64> {
        self.0.input.clone()
    }

    /// `|f_out|` of component `index` (0..4), normalized to unit norm.
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.0.outputs.get(index).cloned().unwrap_or_default()
    }

    /// Phase of the `|00⟩` output.
    pub fn phase_00(&self) -> Vec<f64> {
        self.0.phase_00.clone()
    }

    pub fn fidelity(&self) -> f64 {
        self.0.fidelity
    }

    pub fn success(&self) -> f64 {
        self.0.success
    }
}

#[wasm_bindgen]
pub fn reflected_shapes(g: f64, gamma_s: f64, duration: f64) -> Result<Shapes, JsError> {
    demo::reflected_shapes(g, gamma_s, duration).map(Shapes).map_err(js_err)
}

/// Flattened `[g, P_sim, P_emp]` triples.
#[wasm_bindgen]
pub fn loss_curve(n_atoms: usize, gamma_s: f64, g_min: f64, g_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let curve = demo::loss_curve(n_atoms, gamma_s, g_min, g_max, points).map_err(js_err)?;
    Ok(curve.iter().flat_map(|p| [p.g, p.simulated, p.empirical]).collect())
}

/// Flattened `[ω, |r|, arg r]` triples.
#[wasm_bindgen]
pub fn reflection_spectrum(g: f64, gamma_s: f64, n_coupled: usize, omega_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let s = demo::reflection_spectrum(g, gamma_s, n_coupled, omega_max, points).map_err(js_err)?;
    Ok(s.iter().flat_map(|p| [p.omega, p.magnitude, p.phase]).collect())
}
