//! Training criteria and the multiplicity-weighted class policy. All flow
//! arithmetic is in natural-log space: rewards span three orders of
//! magnitude and per-trajectory products underflow otherwise.

use super::GfnError;

pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Log-probabilities over classes given one logit per class: a class with
/// multiplicity `m` and logit `l` receives the summed probability of its
/// `m` members, `m·exp(l) / Σ m'·exp(l')`.
pub fn class_log_policy(logits: &[f64], multiplicities: &[u32]) -> Result<Vec<f64>, GfnError> {
    if logits.is_empty() {
        return Err(GfnError::NoLegalActions);
    }
    debug_assert_eq!(logits.len(), multiplicities.len());
    let weighted: Vec<f64> = logits
        .iter()
        .zip(multiplicities)
        .map(|(l, &m)| l + f64::from(m).ln())
        .collect();
    let z = logsumexp(&weighted);
    Ok(weighted.into_iter().map(|w| w - z).collect())
}

/// Probability vector over classes; see [`class_log_policy`].
pub fn class_policy(logits: &[f64], multiplicities: &[u32]) -> Result<Vec<f64>, GfnError> {
    Ok(class_log_policy(logits, multiplicities)?.into_iter().map(f64::exp).collect())
}

/// Interior flow matching: `(log Σ F_in − log Σ F_out)²`.
pub fn fm_interior_loss(log_inflows: &[f64], log_outflows: &[f64]) -> Result<f64, GfnError> {
    if log_inflows.is_empty() || log_outflows.is_empty() {
        return Err(GfnError::EmptyFlowList);
    }
    let d = logsumexp(log_inflows) - logsumexp(log_outflows);
    Ok(d * d)
}

/// Terminal flow matching: `(log Σ F_in − log R)²`.
pub fn fm_terminal_loss(log_inflows: &[f64], reward: f64) -> Result<f64, GfnError> {
    if log_inflows.is_empty() {
        return Err(GfnError::EmptyFlowList);
    }
    if reward <= 0.0 {
        return Err(GfnError::NonPositiveReward(reward));
    }
    let d = logsumexp(log_inflows) - reward.ln();
    Ok(d * d)
}

/// Detailed balance on one edge:
/// `(log(F(s)·P_F(s'|s)) − log(F(s')·P_B(s|s')))²`.
pub fn db_loss(log_f_s: f64, log_pf: f64, log_f_s2: f64, log_pb: f64) -> f64 {
    let d = (log_f_s + log_pf) - (log_f_s2 + log_pb);
    d * d
}

/// Trajectory balance: `(log(Z·ΠP_F) − log(R·ΠP_B))²`.
pub fn tb_loss(log_z: f64, log_pf_sum: f64, reward: f64, log_pb_sum: f64) -> Result<f64, GfnError> {
    if reward <= 0.0 {
        return Err(GfnError::NonPositiveReward(reward));
    }
    let d = (log_z + log_pf_sum) - (reward.ln() + log_pb_sum);
    Ok(d * d)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn class_policy_examples() {
        let p = class_policy(&[0.7], &[1]).unwrap();
        assert!((p[0] - 1.0).abs() < TOL);

        let p = class_policy(&[0.3, 0.3], &[3, 1]).unwrap();
        assert!((p[0] - 0.75).abs() < TOL);
        assert!((p[1] - 0.25).abs() < TOL);

        // symmetry off: multiplicities forced to 1
        let p = class_policy(&[0.3, 0.3], &[1, 1]).unwrap();
        assert!((p[0] - 0.5).abs() < TOL);
    }

    #[test]
    fn class_policy_empty_errors() {
        assert!(matches!(class_policy(&[], &[]), Err(GfnError::NoLegalActions)));
    }

    #[test]
    fn fm_examples() {
        let ln = f64::ln;
        assert!(fm_interior_loss(&[ln(1.0), ln(1.0)], &[ln(2.0)]).unwrap() < TOL);
        let expected = 2.0_f64.ln().powi(2);
        assert!((fm_interior_loss(&[ln(2.0)], &[ln(1.0)]).unwrap() - expected).abs() < TOL);
        assert!(fm_interior_loss(&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]).unwrap() < TOL);

        assert!(fm_terminal_loss(&[ln(3.0)], 3.0).unwrap() < TOL);
        assert!(fm_terminal_loss(&[0.0, 0.0], 2.0).unwrap() < TOL);
        assert!((fm_terminal_loss(&[0.0], std::f64::consts::E).unwrap() - 1.0).abs() < TOL);
        assert!(fm_terminal_loss(&[0.0], 0.0).is_err());
        assert!(fm_interior_loss(&[], &[0.0]).is_err());
    }

    #[test]
    fn db_examples() {
        let ln = f64::ln;
        assert!(db_loss(ln(1.0), ln(0.5), ln(1.0), ln(0.5)) < TOL);
        assert!(db_loss(ln(2.0), ln(0.5), ln(1.0), ln(1.0)) < TOL);
        let expected = 2.0_f64.ln().powi(2);
        assert!((db_loss(ln(1.0), ln(1.0), ln(1.0), ln(0.5)) - expected).abs() < TOL);
    }

    #[test]
    fn tb_examples() {
        let ln = f64::ln;
        assert!(tb_loss(ln(3.0), 0.0, 3.0, 0.0).unwrap() < TOL);
        assert!(tb_loss(ln(2.0), ln(0.5), 1.0, 0.0).unwrap() < TOL);
        let expected = 2.0_f64.ln().powi(2);
        assert!((tb_loss(0.0, 0.0, 2.0, 0.0).unwrap() - expected).abs() < TOL);
        assert!(tb_loss(0.0, 0.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn loss_order_invariance() {
        let a = [0.3, -1.2, 0.7, 0.01];
        let b = [0.7, 0.01, 0.3, -1.2];
        let out = [-0.5, 0.2];
        assert!((fm_interior_loss(&a, &out).unwrap() - fm_interior_loss(&b, &out).unwrap()).abs() < TOL);
        assert!((fm_terminal_loss(&a, 1.7).unwrap() - fm_terminal_loss(&b, 1.7).unwrap()).abs() < TOL);
    }
}
