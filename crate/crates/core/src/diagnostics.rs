//! Energy, model residuals and the sign-condition function.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Model;
use crate::error::{IkError, Result};
use crate::evolution::{assemble_rhs, solve_for_phi_rate, RhsBundle};
use crate::field::Field;
use crate::operators::{DepthField, SolverOptions};
use crate::spectral::gradient;
use crate::state::State;

/// Denominator floor for relative energy drift.
pub const ENERGY_FLOOR: f64 = 1e-30;

/// Tolerance of the internal residual identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;

/// Pointwise energy integrand without the `ρ/2` prefactor.
pub fn energy_density(model: &Model, depth: &DepthField, state: &State) -> Field {
    let co = &model.coeffs;
    let grid = &model.grid;
    let n1 = co.count();
    let dim = grid.dim();
    let flat = model.bottom.is_flat();
    let grads: Vec<Vec<Field>> = grid.policy().map_tasks(n1, |j| gradient(&state.phi[j]));
    let gb = &model.bottom.grad;
    let mut out = vec![0.0; grid.len()];
    let (phi, eta) = (&state.phi, state.eta.values());
    grid.policy().fill(&mut out, |k| {
        let mut acc = 0.0;
        for i in 0..n1 {
            for j in 0..n1 {
                let s = co.s(i, j);
                let gg: f64 = (0..dim)
                    .map(|a| grads[i][a].values()[k] * grads[j][a].values()[k])
                    .sum();
                acc += co.a(i, j) * depth.pow(s + 1).values()[k] * gg;
                let c = co.c(i, j);
                if !flat && c != 0.0 {
                    let bg: f64 = (0..dim)
                        .map(|a| gb[a].values()[k] * grads[j][a].values()[k])
                        .sum();
                    acc -= 2.0 * c * depth.pow(s).values()[k] * phi[i].values()[k] * bg;
                }
                let d = co.d(i, j);
                if d != 0.0 {
                    acc += d
                        * depth.pow(s - 1).values()[k]
                        * (1.0 + model.bottom.grad_sq.values()[k])
                        * phi[i].values()[k]
                        * phi[j].values()[k];
                }
            }
        }
        acc + model.g * eta[k] * eta[k]
    });
    Field::from_raw(grid, out)
}

/// `E = (ρ/2) ∫ (…) dx` by the trapezoid rule.
pub fn energy(model: &Model, state: &State) -> Result<f64> {
    let depth = DepthField::from_state(model, state)?;
    Ok(0.5 * model.rho * energy_density(model, &depth, state).integral())
}

/// `R_i = H^{p_i}F_{N+1} − Σ_j L_ij φ_j` and `R̃_i = 𝓛_i φ`.
#[derive(Clone, Debug)]
pub struct Residuals {
    pub r: Vec<Field>,
    pub r_tilde: Vec<Field>,
    /// Largest relative defect of `R̃_i = H^{p_i}R_0 − R_i`.
    pub tilde_identity_defect: f64,
    /// Relative size of `Σ q_i R_i`.
    pub q_identity_defect: f64,
}

pub fn residuals(model: &Model, state: &State) -> Result<Residuals> {
    residuals_from(model, &assemble_rhs(model, state)?)
}

pub fn residuals_from(model: &Model, rhs: &RhsBundle) -> Result<Residuals> {
    let p = model.p.as_slice();
    let depth = &rhs.depth;
    let y = &rhs.l_phi;
    let r: Vec<Field> = (0..p.len())
        .map(|i| &(depth.pow(p[i]) * &rhs.f_np1) - &y[i])
        .collect();
    let r_tilde: Vec<Field> = (1..p.len()).map(|i| &y[i] - &(depth.pow(p[i]) * &y[0])).collect();

    let mut tilde_defect: f64 = 0.0;
    for i in 1..p.len() {
        let hp = depth.pow(p[i]);
        let alt = &(hp * &r[0]) - &r[i];
        let scale = y[i].max_abs() + (hp * &y[0]).max_abs() + (hp * &rhs.f_np1).max_abs() + f64::MIN_POSITIVE;
        tilde_defect = tilde_defect.max((&r_tilde[i - 1] - &alt).max_abs() / scale);
    }
    let mut qsum = Field::zeros(&model.grid);
    let mut qscale = Field::zeros(&model.grid);
    for i in 0..p.len() {
        let qi = &rhs.q.q_vec[i];
        qsum += &(qi * &r[i]);
        let mag = (depth.pow(p[i]) * &rhs.f_np1).map(f64::abs);
        qscale += &(&qi.map(f64::abs) * &(&mag + &y[i].map(f64::abs)));
    }
    let q_defect = qsum.max_abs() / (qscale.max_abs() + f64::MIN_POSITIVE);

    if tilde_defect > IDENTITY_TOL {
        return Err(IkError::IdentityViolation {
            what: "Rtilde_i = H^p_i R_0 - R_i",
            defect: tilde_defect,
        });
    }
    if q_defect > IDENTITY_TOL {
        return Err(IkError::IdentityViolation {
            what: "sum_i q_i R_i = 0",
            defect: q_defect,
        });
    }
    Ok(Residuals {
        r,
        r_tilde,
        tilde_identity_defect: tilde_defect,
        q_identity_defect: q_defect,
    })
}

/// The sign function `a` given `∂_tφ`.
pub fn sign_function(model: &Model, depth: &DepthField, state: &State, dphi: &[Field]) -> Field {
    let p = model.p.as_slice();
    let grid = &model.grid;
    let dim = grid.dim();
    let n1 = p.len();
    let flat = model.bottom.is_flat();
    let grads: Vec<Vec<Field>> = grid.policy().map_tasks(n1, |j| gradient(&state.phi[j]));
    let gb = &model.bottom.grad;
    let phi = &state.phi;
    let mut out = vec![0.0; grid.len()];
    grid.policy().fill(&mut out, |k| {
        let hp = |e: u32| depth.pow(e).values()[k];
        let mut acc = model.g;
        for i in 0..n1 {
            if p[i] > 0 {
                acc += p[i] as f64 * hp(p[i] - 1) * dphi[i].values()[k];
            }
        }
        let mut quad = 0.0;
        for i in 0..n1 {
            let (pi, fi) = (p[i] as f64, phi[i].values()[k]);
            for j in 0..n1 {
                let s = p[i] + p[j];
                let pj = p[j] as f64;
                if s > 0 {
                    let gg: f64 = (0..dim)
                        .map(|a| grads[i][a].values()[k] * grads[j][a].values()[k])
                        .sum();
                    quad += s as f64 * hp(s - 1) * gg;
                }
                if !flat && p[i] > 0 && s > 1 {
                    let bg: f64 = (0..dim)
                        .map(|a| gb[a].values()[k] * grads[j][a].values()[k])
                        .sum();
                    quad -= 2.0 * pi * (s as f64 - 1.0) * hp(s - 2) * fi * bg;
                }
                if p[i] > 0 && p[j] > 0 && s > 2 {
                    quad += pi
                        * pj
                        * (s as f64 - 2.0)
                        * hp(s - 3)
                        * (1.0 + model.bottom.grad_sq.values()[k])
                        * fi
                        * phi[j].values()[k];
                }
            }
        }
        acc + 0.5 * quad
    });
    Field::from_raw(grid, out)
}

/// `a(x)` with `∂_tφ = 𝓛⁻¹F` at the given state.
pub fn sign_condition_a(model: &Model, state: &State, opts: &SolverOptions) -> Result<Field> {
    let rhs = assemble_rhs(model, state)?;
    let (dphi, _) = solve_for_phi_rate(model, &rhs, opts)?;
    Ok(sign_function(model, &rhs.depth, state, &dphi))
}

/// One row of the diagnostics table. Residual norms are RMS over the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    pub drift: f64,
    pub min_h: f64,
    pub min_a: f64,
    pub r: Vec<f64>,
    pub r_tilde: Vec<f64>,
}

/// Evaluates every diagnostic at `state`; `e0` is the reference energy for
/// the drift column (the record's own energy when `None`).
pub fn evaluate(
    model: &Model,
    state: &State,
    e0: Option<f64>,
    opts: &SolverOptions,
) -> Result<DiagnosticsRecord> {
    let rhs = assemble_rhs(model, state)?;
    let res = residuals_from(model, &rhs)?;
    let opts = SolverOptions {
        verify: false,
        ..*opts
    };
    let (dphi, _) = solve_for_phi_rate(model, &rhs, &opts)?;
    let a = sign_function(model, &rhs.depth, state, &dphi);
    let e = 0.5 * model.rho * energy_density(model, &rhs.depth, state).integral();
    let e0 = e0.unwrap_or(e);
    Ok(DiagnosticsRecord {
        t: state.t,
        energy: e,
        drift: (e - e0) / e0.abs().max(ENERGY_FLOOR),
        min_h: rhs.depth.min(),
        min_a: a.min(),
        r: res.r.iter().map(Field::rms).collect(),
        r_tilde: res.r_tilde.iter().map(Field::rms).collect(),
    })
}

/// Records of one run plus the initial-data classification.
#[derive(Clone, Debug, Default, Serialize)]
pub struct DiagnosticsSeries {
    pub records: Vec<DiagnosticsRecord>,
    /// `max_i ‖R̃_i‖ / ‖φ_surface‖` of the initial state.
    pub initial_compatibility: f64,
    pub compatible: bool,
}

impl DiagnosticsSeries {
    pub fn max_abs_drift(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.drift.abs()))
    }

    pub fn max_r_tilde(&self) -> f64 {
        self.records
            .iter()
            .flat_map(|r| r.r_tilde.iter())
            .fold(0.0, |m, v| m.max(*v))
    }

    pub fn min_a(&self) -> f64 {
        self.records.iter().fold(f64::INFINITY, |m, r| m.min(r.min_a))
    }
}

pub fn csv_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = ["t", "E", "E_drift_rel", "min_H", "min_a"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((0..=n).map(|i| format!("R_{i}")));
    h.extend((1..=n).map(|i| format!("Rtilde_{i}")));
    h
}

/// Shortest round-trip text form of a float.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

pub fn write_csv<W: Write>(records: &[DiagnosticsRecord], n: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(n)).map_err(csv_err)?;
    for r in records {
        let mut row: Vec<String> = [r.t, r.energy, r.drift, r.min_h, r.min_a]
            .iter()
            .map(|&v| fmt_f64(v))
            .collect();
        row.extend(r.r.iter().chain(&r.r_tilde).map(|&v| fmt_f64(v)));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<DiagnosticsRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    let cols = header.len();
    if cols < 7 || (cols - 6) % 2 != 0 {
        return Err(IkError::Format(format!(
            "unexpected diagnostics header {header:?}"
        )));
    }
    let n = (cols - 6) / 2;
    if header.iter().collect::<Vec<_>>() != csv_header(n) {
        return Err(IkError::Format(format!(
            "unexpected diagnostics header {header:?}"
        )));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let v: Vec<f64> = row
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| IkError::Format(format!("bad number {s:?}")))
            })
            .collect::<Result<_>>()?;
        out.push(DiagnosticsRecord {
            t: v[0],
            energy: v[1],
            drift: v[2],
            min_h: v[3],
            min_a: v[4],
            r: v[5..6 + n].to_vec(),
            r_tilde: v[6 + n..].to_vec(),
        });
    }
    Ok(out)
}

pub(crate) fn csv_err(e: csv::Error) -> IkError {
    IkError::Format(e.to_string())
}

/// Displacement `s` along `axis` maximizing `Σ a(x) b(x + s)`, in `(−L/2, L/2]`.
///
/// The correlation is evaluated through its exact trigonometric interpolant:
/// the best grid lag is refined by Newton iteration.
pub fn correlation_shift(a: &Field, b: &Field, axis: usize) -> f64 {
    let grid = a.grid();
    let fa = grid.forward(a.values());
    let fb = grid.forward(b.values());
    let kappa: Vec<f64> = (0..grid.len())
        .map(|k| {
            let m = grid.unravel(k);
            grid.axis_wavenumbers(axis)[m[axis]]
        })
        .collect();
    let x: Vec<Complex64> = fa.iter().zip(&fb).map(|(p, q)| p.conj() * q).collect();
    let eval = |s: f64, order: u32| -> f64 {
        x.iter()
            .zip(&kappa)
            .map(|(c, &k)| {
                let e = Complex64::from_polar(1.0, k * s);
                let f = match order {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, k),
                    _ => Complex64::new(-k * k, 0.0),
                };
                (c * e * f).re
            })
            .sum()
    };
    let l = grid.domain().lengths[axis];
    let n = grid.domain().resolution[axis];
    let dx = l / n as f64;
    let (mut s, mut best) = (0.0, f64::NEG_INFINITY);
    for m in 0..n {
        let v = eval(m as f64 * dx, 0);
        if v > best {
            best = v;
            s = m as f64 * dx;
        }
    }
    for _ in 0..50 {
        let d2 = eval(s, 2);
        if d2 >= 0.0 {
            break;
        }
        let step = eval(s, 1) / d2;
        s -= step.clamp(-dx, dx);
        if step.abs() < 1e-14 * l {
            break;
        }
    }
    let s = s.rem_euclid(l);
    if s > 0.5 * l {
        s - l
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, PeriodicDomain};

    #[test]
    fn shift_of_translated_profile() {
        let g = Grid::new(PeriodicDomain::line(10.0, 64).unwrap()).unwrap();
        let k = 2.0 * std::f64::consts::PI / 10.0;
        let a = Field::from_fn(&g, |x, _| (k * x).cos() + 0.3 * (2.0 * k * x).sin());
        for s in [0.0, 0.37, -2.2, 4.9] {
            let b = Field::from_fn(&g, |x, _| (k * (x - s)).cos() + 0.3 * (2.0 * k * (x - s)).sin());
            let got = correlation_shift(&a, &b, 0);
            assert!((got - s).abs() < 1e-9, "shift {s}: got {got}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![
            DiagnosticsRecord {
                t: 0.0,
                energy: 1.25e-3,
                drift: 0.0,
                min_h: 0.98,
                min_a: 9.81,
                r: vec![1e-17, 2.5e-300],
                r_tilde: vec![std::f64::consts::PI],
            },
            DiagnosticsRecord {
                t: 0.1,
                energy: 1.2500000001e-3,
                drift: -3.3e-11,
                min_h: 0.97,
                min_a: 9.7,
                r: vec![0.0, 1.0 / 3.0],
                r_tilde: vec![f64::MIN_POSITIVE],
            },
        ];
        let mut buf = Vec::new();
        write_csv(&recs, 1, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,E,E_drift_rel,min_H,min_a,R_0,R_1,Rtilde_1\n"));
        assert_eq!(read_csv(&buf[..]).unwrap(), recs);
    }

    #[test]
    fn bad_header_rejected() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
