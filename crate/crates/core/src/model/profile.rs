use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{tv, MfgInstance};
use crate::error::{MfgError, Result};

/// Which closed form is used for `barL`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BarLVariant {
    /// `L1·(1 + βK1/2)/(1 − βK1/2)`.
    #[default]
    Conservative,
    /// `L1/(1 − βK1/2)`.
    Compact,
}

/// How a profile was specified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileOrigin {
    /// From `(L1, K1, β, ρ)`, with every derived constant computed.
    Raw,
    /// From the composite constants `K1/ρ`, `barL`, `L1·K1/ρ`, `barK`, `β`.
    /// `barK` and `barL` are taken as given; `ρ = 1`, `K1 = K1/ρ`.
    Composite { k1_over_rho: f64, l1k1_over_rho: f64 },
}

/// Lipschitz constants and the derived quantities of the contraction analysis.
///
/// ```text
/// barL = L1·(1 + βK1/2)/(1 − βK1/2)
/// barK = 3K1/2 + K1·barL/(2ρ(1−β))
/// hatK = barK + K1·barL/ρ
/// r    = barK·β + (K1/ρ)·L1·β
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzProfile {
    pub l1: f64,
    pub k1: f64,
    pub beta: f64,
    pub rho: f64,
    pub bar_l: f64,
    pub bar_k: f64,
    pub hat_k: f64,
    pub r_const: f64,
    /// Cost bound, known only when computed from an instance or supplied.
    pub m: Option<f64>,
    pub variant: BarLVariant,
    pub origin: ProfileOrigin,
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(MfgError::input(format!("{name} = {v} must be finite and >= 0")));
    }
    Ok(())
}

fn discount(beta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&beta) {
        return Err(MfgError::input(format!("beta = {beta} outside [0, 1)")));
    }
    Ok(())
}

impl LipschitzProfile {
    pub fn from_raw(l1: f64, k1: f64, beta: f64, rho: f64) -> Result<Self> {
        Self::from_raw_with(l1, k1, beta, rho, None, BarLVariant::Conservative)
    }

    pub fn from_raw_with(
        l1: f64,
        k1: f64,
        beta: f64,
        rho: f64,
        m: Option<f64>,
        variant: BarLVariant,
    ) -> Result<Self> {
        nonneg("L1", l1)?;
        nonneg("K1", k1)?;
        discount(beta)?;
        if !(rho.is_finite() && rho > 0.0) {
            return Err(MfgError::input(format!("rho = {rho} must be positive")));
        }
        if let Some(m) = m {
            nonneg("M", m)?;
        }
        let half = beta * k1 / 2.0;
        if half >= 1.0 {
            return Err(MfgError::BarLUndefined { beta, k1, value: half });
        }
        let bar_l = match variant {
            BarLVariant::Conservative => l1 * (1.0 + half) / (1.0 - half),
            BarLVariant::Compact => l1 / (1.0 - half),
        };
        let bar_k = 1.5 * k1 + k1 * bar_l / (2.0 * rho * (1.0 - beta));
        let hat_k = bar_k + k1 * bar_l / rho;
        let r_const = bar_k * beta + (k1 / rho) * l1 * beta;
        Ok(LipschitzProfile {
            l1,
            k1,
            beta,
            rho,
            bar_l,
            bar_k,
            hat_k,
            r_const,
            m,
            variant,
            origin: ProfileOrigin::Raw,
        })
    }

    /// Profile given by composite constants, bypassing table analysis.
    pub fn from_composite(k1_over_rho: f64, bar_l: f64, l1k1_over_rho: f64, bar_k: f64, beta: f64) -> Result<Self> {
        nonneg("K1_over_rho", k1_over_rho)?;
        nonneg("barL", bar_l)?;
        nonneg("L1K1_over_rho", l1k1_over_rho)?;
        nonneg("barK", bar_k)?;
        discount(beta)?;
        if k1_over_rho == 0.0 && l1k1_over_rho != 0.0 {
            return Err(MfgError::input("L1K1_over_rho must be 0 when K1_over_rho is 0"));
        }
        let l1 = if k1_over_rho > 0.0 { l1k1_over_rho / k1_over_rho } else { 0.0 };
        Ok(LipschitzProfile {
            l1,
            k1: k1_over_rho,
            beta,
            rho: 1.0,
            bar_l,
            bar_k,
            hat_k: bar_k + k1_over_rho * bar_l,
            r_const: bar_k * beta + l1k1_over_rho * beta,
            m: None,
            variant: BarLVariant::Conservative,
            origin: ProfileOrigin::Composite { k1_over_rho, l1k1_over_rho },
        })
    }

    pub fn k1_over_rho(&self) -> f64 {
        match self.origin {
            ProfileOrigin::Raw => self.k1 / self.rho,
            ProfileOrigin::Composite { k1_over_rho, .. } => k1_over_rho,
        }
    }

    pub fn l1k1_over_rho(&self) -> f64 {
        match self.origin {
            ProfileOrigin::Raw => self.l1 * self.k1 / self.rho,
            ProfileOrigin::Composite { l1k1_over_rho, .. } => l1k1_over_rho,
        }
    }

    /// `barL·K1/ρ`, the weight on the upper band of `A_T`.
    pub fn barl_k1_over_rho(&self) -> f64 {
        match self.origin {
            ProfileOrigin::Raw => self.bar_l * self.k1 / self.rho,
            ProfileOrigin::Composite { k1_over_rho, .. } => self.bar_l * k1_over_rho,
        }
    }

    /// True when every coupling constant vanishes.
    pub fn is_decoupled(&self) -> bool {
        self.hat_k == 0.0 && self.barl_k1_over_rho() == 0.0 && self.l1k1_over_rho() == 0.0
    }

    pub fn to_json_value(&self) -> Value {
        let mut doc = match self.origin {
            ProfileOrigin::Raw => {
                let mut d = json!({
                    "L1": self.l1,
                    "K1": self.k1,
                    "beta": self.beta,
                    "rho": self.rho,
                    "barl_variant": self.variant,
                });
                if let Some(m) = self.m {
                    d["M"] = json!(m);
                }
                d
            }
            ProfileOrigin::Composite { k1_over_rho, l1k1_over_rho } => json!({
                "K1_over_rho": k1_over_rho,
                "barL": self.bar_l,
                "L1K1_over_rho": l1k1_over_rho,
                "barK": self.bar_k,
                "beta": self.beta,
            }),
        };
        doc["derived"] = json!({
            "barL": self.bar_l,
            "barK": self.bar_k,
            "hatK": self.hat_k,
            "r": self.r_const,
        });
        doc
    }

    /// Parses a raw document (`L1`, `K1`, `beta`, `rho`, optional `M`,
    /// `barl_variant`) or a composite one (`K1_over_rho`, `barL`,
    /// `L1K1_over_rho`, `barK`, `beta`). A `derived` block is ignored.
    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| MfgError::input("profile: expected a JSON object"))?;
        let num = |key: &str| -> Result<f64> {
            match obj.get(key) {
                None => Err(MfgError::input(format!("profile: missing key `{key}`"))),
                Some(x) => x.as_f64().ok_or_else(|| MfgError::input(format!("profile: `{key}` is not a number"))),
            }
        };
        if obj.contains_key("K1_over_rho") {
            check_keys(obj, &["K1_over_rho", "barL", "L1K1_over_rho", "barK", "beta", "derived"])?;
            Self::from_composite(num("K1_over_rho")?, num("barL")?, num("L1K1_over_rho")?, num("barK")?, num("beta")?)
        } else {
            check_keys(obj, &["L1", "K1", "beta", "rho", "M", "barl_variant", "derived"])?;
            let m = if obj.contains_key("M") { Some(num("M")?) } else { None };
            let variant = match obj.get("barl_variant") {
                None => BarLVariant::Conservative,
                Some(x) => serde_json::from_value(x.clone())
                    .map_err(|e| MfgError::input(format!("profile: `barl_variant`: {e}")))?,
            };
            Self::from_raw_with(num("L1")?, num("K1")?, num("beta")?, num("rho")?, m, variant)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("profile serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| MfgError::input(format!("profile: {e}")))?;
        Self::from_json_value(&v)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| MfgError::input(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(MfgError::input(format!("profile: unexpected key `{k}`")));
        }
    }
    Ok(())
}

/// Lipschitz constants of an instance's cost and transition.
///
/// Both maps are affine in `μ`, so oscillations over the simplex are attained
/// at point masses and it suffices to scan `δ_z`.
pub fn compute_lipschitz_profile(inst: &MfgInstance) -> Result<LipschitzProfile> {
    compute_lipschitz_profile_with(inst, BarLVariant::Conservative)
}

pub fn compute_lipschitz_profile_with(inst: &MfgInstance, variant: BarLVariant) -> Result<LipschitzProfile> {
    let (n, m) = (inst.n_states, inst.n_actions);
    let vertex = |z: usize| {
        let mut d = vec![0.0; n];
        d[z] = 1.0;
        d
    };

    // cost[z][x][a] and trans[z][x][a] at the vertex measure δ_z
    let mut cost = vec![vec![vec![0.0; m]; n]; n];
    let mut trans = vec![vec![vec![vec![0.0; n]; m]; n]; n];
    for z in 0..n {
        let d = vertex(z);
        for x in 0..n {
            for a in 0..m {
                cost[z][x][a] = inst.cost(x, a, &d);
                inst.transition_into(x, a, &d, &mut trans[z][x][a]);
            }
        }
    }

    let mut osc_x_c = 0.0f64;
    let mut osc_a_c = 0.0f64;
    let mut osc_x_p = 0.0f64;
    let mut osc_a_p = 0.0f64;
    for z in 0..n {
        for a in 0..m {
            for x in 0..n {
                for y in x + 1..n {
                    osc_x_c = osc_x_c.max((cost[z][x][a] - cost[z][y][a]).abs());
                    osc_x_p = osc_x_p.max(tv(&trans[z][x][a], &trans[z][y][a]));
                }
            }
        }
        for x in 0..n {
            for a in 0..m {
                for b in a + 1..m {
                    osc_a_c = osc_a_c.max((cost[z][x][a] - cost[z][x][b]).abs());
                    osc_a_p = osc_a_p.max(tv(&trans[z][x][a], &trans[z][x][b]));
                }
            }
        }
    }

    let mut range_wc = 0.0f64;
    let mut range_p1 = 0.0f64;
    for x in 0..n {
        for a in 0..m {
            let w = &inst.wc[x][a];
            let hi = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = w.iter().cloned().fold(f64::INFINITY, f64::min);
            range_wc = range_wc.max(hi - lo);
            for z in 0..n {
                for zz in z + 1..n {
                    range_p1 = range_p1.max(tv(inst.p1[x][a][z].as_slice(), inst.p1[x][a][zz].as_slice()));
                }
            }
        }
    }

    let l1 = osc_x_c.max(0.5 * osc_a_c).max(0.5 * range_wc);
    let k1 = (2.0 * osc_x_p).max(osc_a_p).max(inst.eta_p * range_p1);
    LipschitzProfile::from_raw_with(l1, k1, inst.beta, inst.tau, Some(inst.cost_bound()), variant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barl_closed_form() {
        let p = LipschitzProfile::from_raw(0.1, 0.5, 0.9, 1.0).unwrap();
        // 0.1·(1 + 0.225)/(1 − 0.225)
        let oracle = 0.1 * 1.225 / 0.775;
        assert!((p.bar_l - oracle).abs() < 1e-15);
        assert!((p.bar_l - 0.158065).abs() < 1e-6);
        let q = LipschitzProfile::from_raw_with(0.1, 0.5, 0.9, 1.0, None, BarLVariant::Compact).unwrap();
        assert!((q.bar_l - 0.1 / 0.775).abs() < 1e-15);
        assert!(q.bar_l < p.bar_l);
    }

    #[test]
    fn derived_constants_recompute() {
        let p = LipschitzProfile::from_raw(0.3, 0.7, 0.8, 2.0).unwrap();
        assert_eq!(p.bar_k, 1.5 * p.k1 + p.k1 * p.bar_l / (2.0 * p.rho * (1.0 - p.beta)));
        assert_eq!(p.hat_k, p.bar_k + p.k1 * p.bar_l / p.rho);
        assert_eq!(p.r_const, p.bar_k * p.beta + (p.k1 / p.rho) * p.l1 * p.beta);
        assert!(p.hat_k >= p.bar_k);
    }

    #[test]
    fn barl_undefined() {
        let e = LipschitzProfile::from_raw(0.1, 2.5, 0.9, 1.0).unwrap_err();
        assert!(matches!(e, MfgError::BarLUndefined { .. }));
        assert_eq!(e.exit_code(), 4);
    }

    #[test]
    fn composite_fig1a() {
        let p = LipschitzProfile::from_composite(1.0, 0.08, 0.04, 0.2, 0.9).unwrap();
        assert_eq!(p.k1_over_rho(), 1.0);
        assert_eq!(p.l1k1_over_rho(), 0.04);
        assert_eq!(p.barl_k1_over_rho(), 0.08);
        assert!((p.hat_k - 0.28).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_and_errors() {
        let raw = LipschitzProfile::from_raw_with(0.1, 0.3, 0.7, 0.9, Some(1.5), BarLVariant::Compact).unwrap();
        assert_eq!(LipschitzProfile::from_json(&raw.to_json()).unwrap(), raw);
        let comp = LipschitzProfile::from_composite(1.0, 0.35, 0.2, 0.3, 0.5).unwrap();
        assert_eq!(LipschitzProfile::from_json(&comp.to_json()).unwrap(), comp);

        let err = LipschitzProfile::from_json(r#"{"L1": 0.1, "K1": 0.2, "beta": 0.5}"#).unwrap_err();
        assert!(err.to_string().contains("`rho`"));
        assert!(LipschitzProfile::from_json(r#"{"L1": 0.1, "K1": 0.2, "beta": 0.5, "rho": 1, "x": 0}"#).is_err());
    }
}
