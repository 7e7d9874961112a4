use super::exact::{entropy_of_values, ExactPropagator};
use super::{Boundary, Coupling, IsingSpec, QuenchResult};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::mps::{significant, CanonicalForm, MatrixProductState, Sweep};

pub const DEFAULT_HARD_CAP: usize = 1024;

/// How each two-site SVD is truncated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TruncationPolicy {
    /// Keep at most `D` Schmidt values.
    MaxBond(usize),
    /// Per-step budget: each of the `G` gate applications in a step drops
    /// the largest tail whose weight is at most `eps / G` times the weight
    /// of its two-site block.
    Epsilon(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TebdConfig {
    pub dt: f64,
    pub steps: usize,
    pub policy: TruncationPolicy,
    /// The run stops (flagged) once the policy asks for more than this.
    pub hard_cap: usize,
    /// Ends the run (unflagged) after the first step whose maximal bond
    /// reaches this value.
    pub stop_at_bond: Option<usize>,
}

impl TebdConfig {
    pub fn new(dt: f64, steps: usize, policy: TruncationPolicy) -> Self {
        Self {
            dt,
            steps,
            policy,
            hard_cap: DEFAULT_HARD_CAP,
            stop_at_bond: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid(format!("time step {} must be positive", self.dt)));
        }
        if self.hard_cap == 0 {
            return Err(Error::invalid("hard bond cap must be at least 1"));
        }
        match self.policy {
            TruncationPolicy::MaxBond(0) => Err(Error::invalid("max bond must be at least 1")),
            TruncationPolicy::MaxBond(d) if d > self.hard_cap => Err(Error::invalid(format!(
                "max bond {d} exceeds the hard cap {}",
                self.hard_cap
            ))),
            TruncationPolicy::Epsilon(e) if !(0.0..1.0).contains(&e) => {
                Err(Error::invalid(format!("truncation budget {e} must lie in [0, 1)")))
            }
            _ => Ok(()),
        }
    }
}

/// `exp(-i h tau)` for the two-site term on bond `(k, k+1)`. The field is
/// split evenly between the two bonds touching an interior site.
fn bond_gate(spec: &IsingSpec, k: usize, tau: f64) -> Result<ComplexMatrix> {
    let n = spec.n;
    let w = |site: usize| if site == 0 || site == n - 1 { 1.0 } else { 0.5 };
    let x = ComplexMatrix::from_fn(2, 2, |i, j| C64::new(if i != j { 1.0 } else { 0.0 }, 0.0));
    let z = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
    let id = ComplexMatrix::identity(2);
    let c = match spec.coupling {
        Coupling::XX => &x,
        Coupling::ZZ => &z,
    };
    let h = c
        .kron(c)
        .add(&z.kron(&id).scale(C64::new(spec.g * w(k), 0.0)))?
        .add(&id.kron(&z).scale(C64::new(spec.g * w(k + 1), 0.0)))?
        .scale(C64::new(-1.0, 0.0));
    let eig = hermitian_eig(&h)?;
    let phases: Vec<C64> = eig.values.iter().map(|e| C64::from_polar(1.0, -e * tau)).collect();
    let v = &eig.vectors;
    Ok(ComplexMatrix::from_fn(4, 4, |i, j| {
        (0..4).fold(C64::new(0.0, 0.0), |acc, e| acc + v[(i, e)] * phases[e] * v[(j, e)].conj())
    }))
}

struct Layer {
    bonds: Vec<usize>,
    gates: Vec<ComplexMatrix>,
}

impl Layer {
    fn new(spec: &IsingSpec, parity: usize, tau: f64) -> Result<Self> {
        let bonds: Vec<usize> = (parity..spec.n - 1).step_by(2).collect();
        let gates = bonds
            .iter()
            .map(|&k| bond_gate(spec, k, tau))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bonds, gates })
    }
}

struct Stepper {
    policy: TruncationPolicy,
    gates_per_step: usize,
    hard_cap: usize,
    hit_cap: bool,
}

impl Stepper {
    fn keep(&mut self, s: &[f64]) -> usize {
        let sig = significant(s);
        let want = match self.policy {
            TruncationPolicy::MaxBond(d) => return sig.min(d),
            TruncationPolicy::Epsilon(eps) => {
                let total: f64 = s.iter().map(|x| x * x).sum();
                let budget = eps / self.gates_per_step as f64 * total;
                let mut tail = 0.0;
                let mut keep = sig;
                while keep > 1 {
                    let w = s[keep - 1] * s[keep - 1];
                    if tail + w > budget {
                        break;
                    }
                    tail += w;
                    keep -= 1;
                }
                keep
            }
        };
        if want > self.hard_cap {
            self.hit_cap = true;
            self.hard_cap
        } else {
            want
        }
    }

    /// Applies one layer, sweeping away from the current center.
    fn apply(&mut self, psi: &mut MatrixProductState, layer: &Layer) -> Result<f64> {
        let CanonicalForm::Mixed(c) = psi.canonical_form() else {
            return Err(Error::invalid("TEBD state lost its canonical form"));
        };
        let mut dropped = 0.0;
        let rightwards = 2 * c < psi.len();
        let order: Vec<usize> = if rightwards {
            (0..layer.bonds.len()).collect()
        } else {
            (0..layer.bonds.len()).rev().collect()
        };
        for idx in order {
            let k = layer.bonds[idx];
            let (to, sweep) = if rightwards { (k, Sweep::Right) } else { (k + 1, Sweep::Left) };
            psi.move_center(to);
            let (_, w) = psi.apply_two_site(k, &layer.gates[idx], sweep, |s| self.keep(s))?;
            dropped += w;
        }
        Ok(dropped)
    }
}

/// Second-order Trotter evolution `A(dt/2) B(dt) A(dt/2)` per step, where
/// `A` holds the even bonds and `B` the odd ones. Open boundary only.
///
/// The state is never renormalized, so `norm^2 = 1 - cumulative discarded
/// weight`. Entropies are computed from the renormalized half-chain
/// spectrum. With a `reference`, the 2-norm distance to the exact state is
/// recorded at every step.
pub fn tebd_evolve(
    psi0: &MatrixProductState,
    spec: &IsingSpec,
    cfg: &TebdConfig,
    reference: Option<&ExactPropagator>,
) -> Result<QuenchResult> {
    spec.validate()?;
    cfg.validate()?;
    if spec.boundary != Boundary::Open {
        return Err(Error::invalid("TEBD runs on open chains; use the exact propagator for periodic ones"));
    }
    if psi0.len() != spec.n || psi0.phys_dim() != 2 {
        return Err(Error::ShapeMismatch(format!(
            "state has {} sites of dimension {}, Hamiltonian needs {} qubits",
            psi0.len(),
            psi0.phys_dim(),
            spec.n
        )));
    }
    if let Some(p) = reference {
        if p.sites() != spec.n {
            return Err(Error::ShapeMismatch("reference propagator has a different chain length".into()));
        }
    }
    psi0.require_normalized()?;
    let half_a = Layer::new(spec, 0, cfg.dt / 2.0)?;
    let full_b = Layer::new(spec, 1, cfg.dt)?;
    let cut = spec.n / 2;
    let mut psi = psi0.canonicalize(0)?;
    let mut stepper = Stepper {
        policy: cfg.policy,
        gates_per_step: (2 * half_a.bonds.len() + full_b.bonds.len()).max(1),
        hard_cap: cfg.hard_cap,
        hit_cap: false,
    };
    let mut r = QuenchResult::empty(Boundary::Open);
    let mut errors = reference.map(|_| Vec::with_capacity(cfg.steps + 1));
    let mut cum = 0.0;

    let mut record = |psi: &mut MatrixProductState, t: f64, step_w: f64, cum: f64| -> Result<()> {
        let s = psi.center_cut_values(cut)?;
        r.times.push(t);
        r.half_chain_entropy_bits.push(entropy_of_values(&s)?);
        r.max_bond.push(psi.max_bond());
        r.per_step_truncation.push(step_w);
        r.cum_truncation.push(cum);
        r.norm_squared.push(psi.norm_squared());
        if let (Some(errs), Some(p)) = (errors.as_mut(), reference) {
            let exact = p.state_at(t);
            let v = psi.to_dense()?;
            let e: f64 = v.iter().zip(&exact).map(|(a, b)| (a - b).norm_sqr()).sum();
            errs.push(e.sqrt());
        }
        Ok(())
    };

    record(&mut psi, 0.0, 0.0, 0.0)?;
    for step in 1..=cfg.steps {
        let mut w = stepper.apply(&mut psi, &half_a)?;
        w += stepper.apply(&mut psi, &full_b)?;
        w += stepper.apply(&mut psi, &half_a)?;
        cum += w;
        record(&mut psi, step as f64 * cfg.dt, w, cum)?;
        if stepper.hit_cap || cfg.stop_at_bond.is_some_and(|d| psi.max_bond() >= d) {
            break;
        }
    }
    r.exact_error = errors;
    r.truncated_run = stepper.hit_cap;
    Ok(r)
}
