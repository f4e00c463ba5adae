use crate::config::Model;
use crate::error::Result;
use crate::field::Field;
use crate::operators::{apply_l_matrix, q_weights, traces_from_gradients, DepthField, QWeights, Traces};
use crate::spectral::{divergence, dot, gradient};
use crate::state::State;

/// Right-hand side of the reduced system at one state, with the
/// intermediate fields needed by diagnostics.
#[derive(Clone, Debug)]
pub struct RhsBundle {
    pub f0: Field,
    /// `F_1..F_N`
    pub f: Vec<Field>,
    pub f_np1: Field,
    /// `f_1..f_N`
    pub fi: Vec<Field>,
    pub traces: Traces,
    /// `(Σ_j L_ij φ_j)_{i=0..N}`
    pub l_phi: Vec<Field>,
    pub q: QWeights,
    pub depth: DepthField,
}

impl RhsBundle {
    /// `(F_0, F_1, …, F_N)`
    pub fn full_f(&self) -> Vec<Field> {
        std::iter::once(self.f0.clone())
            .chain(self.f.iter().cloned())
            .collect()
    }
}

/// `F₀ = −gη − ½(|u|² + w²)`
pub fn surface_bernoulli(g: f64, eta: &Field, traces: &Traces) -> Field {
    let mut kin = dot(&traces.u, &traces.u);
    kin += &(&traces.w * &traces.w);
    let mut out = eta.scale(-g);
    out.axpy(-0.5, &kin);
    out
}

pub fn assemble_rhs(model: &Model, state: &State) -> Result<RhsBundle> {
    let depth = DepthField::from_state(model, state)?;
    let phi = &state.phi;
    let p = model.p.as_slice();
    let policy = model.grid.policy();
    let grads = policy.map_tasks(phi.len(), |j| gradient(&phi[j]));
    let traces = traces_from_gradients(model, &depth, phi, &grads);
    let f0 = surface_bernoulli(model.g, &state.eta, &traces);
    let l_phi = apply_l_matrix(model, &depth, phi);

    // Σ_j ( H^{p_j+1}/(p_j+1) Δφ_j − [p_j > 0] H^{p_j} ∇·(φ_j ∇b) )
    let flat = model.bottom.is_flat();
    let mut bracket = Field::zeros(&model.grid);
    for (j, &pj) in p.iter().enumerate() {
        let lap = divergence(&grads[j]);
        bracket.axpy(1.0 / (pj as f64 + 1.0), &(depth.pow(pj + 1) * &lap));
        if !flat && pj > 0 {
            let flux: Vec<Field> = model.bottom.grad.iter().map(|gb| &phi[j] * gb).collect();
            bracket -= &(depth.pow(pj) * &divergence(&flux));
        }
    }
    // ∇b·u − w − bracket
    let mut core = if flat {
        Field::zeros(&model.grid)
    } else {
        dot(&model.bottom.grad, &traces.u)
    };
    core -= &traces.w;
    core -= &bracket;

    let fi: Vec<Field> = (1..p.len())
        .map(|i| (depth.pow(p[i] - 1) * &core).scale(p[i] as f64))
        .collect();
    let f: Vec<Field> = fi.iter().map(|fi| fi * &l_phi[0]).collect();

    let q = q_weights(p, &depth)?;
    let mut f_np1 = Field::zeros(&model.grid);
    for (qi, yi) in q.q_vec.iter().zip(&l_phi) {
        f_np1 -= &(qi * yi);
    }
    for fld in std::iter::once(&f0).chain(&f).chain([&f_np1]) {
        fld.check_finite()?;
    }
    Ok(RhsBundle {
        f0,
        f,
        f_np1,
        fi,
        traces,
        l_phi,
        q,
        depth,
    })
}
