use super::solve::rho;
use super::{RiskError, SolveOptions, Strategy};
use crate::acceptance::{induced_acceptance, AcceptanceSet, SetFlags};
use crate::market::ValidatedMarket;

/// `A_ρ = {X : ρ(X) <= 0}` for `ρ` built from `base` and a market.
#[derive(Debug, Clone)]
pub struct InducedSet {
    base: AcceptanceSet,
    market: ValidatedMarket,
    opts: SolveOptions,
}

impl InducedSet {
    pub fn base(&self) -> &AcceptanceSet {
        &self.base
    }

    pub fn market(&self) -> &ValidatedMarket {
        &self.market
    }

    pub fn opts(&self) -> &SolveOptions {
        &self.opts
    }

    /// Whether membership is decided exactly, i.e. `ρ` for the base set is
    /// computed by an LP or by enumeration.
    pub fn exact(&self) -> bool {
        self.base.polyhedral().is_some()
            || (self.base.scenario_union().is_some() && self.market.n_states() <= self.opts.n_enum)
    }

    /// `ρ(X) <= tol`. Solver failures count as rejection.
    pub fn member(&self, x: &[f64]) -> bool {
        match rho(&self.base, &self.market, x, &self.opts) {
            Ok(r) => {
                let tol = if r.strategy == Strategy::Reduction {
                    self.opts.bisect_tol
                } else {
                    self.base.tol()
                };
                r.value.to_f64() <= tol
            }
            Err(_) => false,
        }
    }
}

/// Acceptance set `{X : ρ_{A,M,π}(X) <= 0}`. Convexity, the cone property
/// and closure under addition carry over from `A`.
pub fn induced_rho_acceptance(a: &AcceptanceSet, vm: &ValidatedMarket, opts: &SolveOptions) -> Result<AcceptanceSet, RiskError> {
    if a.dim() != vm.n_states() {
        return Err(RiskError::DimensionMismatch(format!(
            "set over {} states, market over {}",
            a.dim(),
            vm.n_states()
        )));
    }
    opts.check()?;
    let flags: SetFlags = a.flags();
    let induced = InducedSet {
        base: a.clone(),
        market: vm.clone(),
        opts: opts.clone(),
    };
    Ok(induced_acceptance(a.dim(), induced, flags).with_label(format!("induced({})", a.label())))
}
