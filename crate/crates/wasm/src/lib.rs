//! JSON-in/JSON-out bindings for the browser demo. Every export returns a
//! JSON string; failures come back as `{"error", "message"}`.

use num_complex::Complex64;
use rmpbe::io::{c_to_json, ProblemFile};
use rmpbe::spectrum::{homotopy_curves, rmp_eigenvalues, SpectrumResult};
use rmpbe::{eta_structured, eta_unstructured, optimal_perturbation, Config, Error, Rmp, StructureTag};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const DEMOS: [(&str, &str); 3] = [
    ("hermitian", include_str!("../../cli/demos/hermitian.json")),
    ("star_palindromic", include_str!("../../cli/demos/star_palindromic.json")),
    ("symmetric", include_str!("../../cli/demos/symmetric.json")),
];

fn fail(e: Error) -> Value {
    json!({ "error": e.code(), "message": e.to_string() })
}

fn finish(r: Result<Value, Error>) -> String {
    r.unwrap_or_else(fail).to_string()
}

fn load(problem: &str) -> Result<(ProblemFile, Rmp, Config), Error> {
    let p = ProblemFile::parse(problem)?;
    let g = p.rmp.to_rmp()?;
    let cfg = Config { tol: p.options.tolerances, seed: p.options.seed, ..Config::default() };
    Ok((p, g, cfg))
}

fn spectrum_json(s: &SpectrumResult) -> Value {
    json!({
        "eigenvalues": s.eigenvalues.iter().map(|z| c_to_json(*z)).collect::<Vec<_>>(),
        "pole_flags": s.pole_flags,
    })
}

/// Names of the bundled demo problems.
#[wasm_bindgen]
pub fn demo_names() -> String {
    json!(DEMOS.iter().map(|d| d.0).collect::<Vec<_>>()).to_string()
}

/// Problem file text of a bundled demo.
#[wasm_bindgen]
pub fn demo_problem(name: &str) -> String {
    DEMOS
        .iter()
        .find(|d| d.0 == name)
        .map(|d| d.1.to_string())
        .unwrap_or_else(|| fail(Error::Invalid(format!("unknown demo {name:?}"))).to_string())
}

/// Eigenvalues of the problem's RMP.
#[wasm_bindgen]
pub fn spectrum(problem: &str) -> String {
    finish(load(problem).and_then(|(_, g, cfg)| Ok(spectrum_json(&rmp_eigenvalues(&g, &cfg.tol)?))))
}

/// Unstructured and structured backward errors at re + i·im.
#[wasm_bindgen]
pub fn backward_errors(problem: &str, re: f64, im: f64) -> String {
    finish(load(problem).and_then(|(p, g, cfg)| {
        let lambda = Complex64::new(re, im);
        let tag: StructureTag = p.structure();
        let u = eta_unstructured(&g, lambda, &cfg.tol)?;
        let s = eta_structured(&g, lambda, tag, &cfg)?;
        Ok(json!({
            "structure": tag,
            "lambda": c_to_json(lambda),
            "eta_unstructured": u.eta,
            "eta_structured": s.eta,
            "exactness": s.exactness,
            "method": s.diagnostics.method,
        }))
    }))
}

/// Spectra of G − tΔ for t on a uniform grid, Δ the optimal structured
/// perturbation at re + i·im.
#[wasm_bindgen]
pub fn homotopy(problem: &str, re: f64, im: f64, steps: usize) -> String {
    finish(load(problem).and_then(|(p, g, cfg)| {
        let lambda = Complex64::new(re, im);
        let res = eta_structured(&g, lambda, p.structure(), &cfg)?;
        let delta = optimal_perturbation(&g, &res, &cfg.tol)?;
        let steps = homotopy_curves(&g, &delta, steps, &cfg.tol)?;
        let steps: Vec<Value> = steps
            .iter()
            .map(|st| match &st.spectrum {
                Ok(s) => json!({ "t": st.t, "spectrum": spectrum_json(s) }),
                Err(e) => json!({ "t": st.t, "spectrum": fail(e.clone()) }),
            })
            .collect();
        Ok(json!({ "eta": res.eta, "exactness": res.exactness, "steps": steps }))
    }))
}
