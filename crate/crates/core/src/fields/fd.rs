use super::domain::SpaceTimeDomain;
use super::testfield::TestField;
use crate::numeric::fornberg_weights;
use crate::{Error, Result};

/// Stencil half-width giving sixth-order accuracy for a central difference
/// of the given derivative order.
pub fn half_width(order: usize) -> usize {
    match order {
        0 => 0,
        1 | 2 => 3,
        _ => 4,
    }
}

fn stencil(order: usize) -> (Vec<f64>, Vec<f64>) {
    let hw = half_width(order) as i64;
    let offs: Vec<f64> = (-hw..=hw).map(|k| k as f64).collect();
    let w = if order == 0 {
        vec![1.0]
    } else {
        fornberg_weights(&offs, order)
    };
    let offs = if order == 0 { vec![0.0] } else { offs };
    (offs, w)
}

/// Sixth-order central finite-difference estimate of the partial derivative
/// with orders `multi_index` (time first) at `point`, with step `h` on every
/// differentiated axis. Independent of the analytic derivative code: it only
/// samples field values.
pub fn fd_oracle(
    field: &TestField,
    multi_index: &[usize],
    point: &[f64],
    h: f64,
    domain: &SpaceTimeDomain,
) -> Result<f64> {
    fd_oracle_steps(field, multi_index, point, &vec![h; domain.dim() + 1], domain)
}

/// Step, as a fraction of the axis extent, that balances truncation against
/// round-off for the generated fields at a given derivative order.
pub fn default_step(order: usize) -> f64 {
    match order {
        0..=2 => 0.005,
        3 => 0.008,
        _ => 0.01,
    }
}

/// [`fd_oracle_steps`] with [`default_step`] on every axis.
pub fn fd_oracle_auto(field: &TestField, multi_index: &[usize], point: &[f64], domain: &SpaceTimeDomain) -> Result<f64> {
    let steps: Vec<f64> = (0..domain.dim() + 1)
        .map(|a| {
            let (lo, hi) = domain.axis_bounds(a);
            default_step(multi_index.get(a).copied().unwrap_or(0)) * (hi - lo)
        })
        .collect();
    fd_oracle_steps(field, multi_index, point, &steps, domain)
}

/// Multi-indices (∂s order first) that manufactured fields serve with full
/// accuracy: up to ∂s², spatial order up to 4, and ∂s with up to two
/// spatial derivatives.
pub fn contract_orders(dim: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    for a in 0..=2 {
        for bx in 0..=4usize {
            for by in 0..=(if dim == 2 { 4 - bx } else { 0 }) {
                let space = bx + by;
                if a == 0 || space == 0 || (a == 1 && space <= 2) {
                    let mut m = vec![a, bx];
                    if dim == 2 {
                        m.push(by);
                    }
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Largest |oracle − exact| over `points`, relative to max(|exact|, RMS of
/// exact over the points). A field whose derivative vanishes at every point
/// is measured by the largest absolute oracle value.
pub fn oracle_agreement(
    field: &TestField,
    multi_index: &[usize],
    points: &[Vec<f64>],
    domain: &SpaceTimeDomain,
) -> Result<f64> {
    let exact = points
        .iter()
        .map(|p| field.partial(multi_index, p))
        .collect::<Result<Vec<f64>>>()?;
    let rms = (exact.iter().map(|x| x * x).sum::<f64>() / exact.len().max(1) as f64).sqrt();
    let mut worst: f64 = 0.0;
    for (p, &e) in points.iter().zip(&exact) {
        let fd = fd_oracle_auto(field, multi_index, p, domain)?;
        worst = worst.max(if rms == 0.0 { fd.abs() } else { (fd - e).abs() / e.abs().max(rms) });
    }
    Ok(worst)
}

/// [`fd_oracle`] with its own step on every axis; `steps[0]` is the time step.
pub fn fd_oracle_steps(
    field: &TestField,
    multi_index: &[usize],
    point: &[f64],
    steps: &[f64],
    domain: &SpaceTimeDomain,
) -> Result<f64> {
    let naxes = domain.dim() + 1;
    if steps.len() != naxes || steps.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::Config("one positive step per axis required".into()));
    }
    if multi_index.len() != naxes || point.len() != naxes || field.dim != domain.dim() {
        return Err(Error::OrderUnsupported {
            order: multi_index.to_vec(),
        });
    }
    if multi_index[0] > 2 || multi_index[1..].iter().any(|&k| k > 4) {
        return Err(Error::OrderUnsupported {
            order: multi_index.to_vec(),
        });
    }
    let stencils: Vec<(Vec<f64>, Vec<f64>)> = multi_index.iter().map(|&k| stencil(k)).collect();
    for (a, &k) in multi_index.iter().enumerate() {
        let (lo, hi) = domain.axis_bounds(a);
        let reach = half_width(k) as f64 * steps[a];
        if k > 0 && (point[a] - reach < lo || point[a] + reach > hi) {
            return Err(Error::StencilOutOfDomain { axis: a });
        }
    }
    let mut idx = vec![0usize; naxes];
    let mut sum = 0.0;
    let mut q = point.to_vec();
    loop {
        let mut w = 1.0;
        for a in 0..naxes {
            let (o, ws) = &stencils[a];
            q[a] = point[a] + o[idx[a]] * steps[a];
            w *= ws[idx[a]];
        }
        if w != 0.0 {
            sum += w * field.value(&q);
        }
        let mut a = naxes;
        loop {
            if a == 0 {
                let scale: f64 = steps.iter().zip(multi_index).map(|(h, &k)| h.powi(k as i32)).product();
                return Ok(sum / scale);
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < stencils[a].0.len() {
                break;
            }
            idx[a] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::testfield::{Factor, Primitive, TestField};

    #[test]
    fn quartic_fourth_derivative() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let f = TestField::single(
            1.0,
            Factor::one(),
            vec![Factor(vec![Primitive::Poly {
                coeffs: vec![0.0, 0.0, 0.0, 0.0, 1.0],
            }])],
        );
        let v = fd_oracle(&f, &[0, 4], &[0.5, 0.5], 0.01, &d).unwrap();
        assert!((v - 24.0).abs() < 1e-6);
    }

    #[test]
    fn sine_second_time_derivative_at_zero() {
        let d = SpaceTimeDomain::interval(-1.0, 1.0, 1.0).unwrap();
        let f = TestField::single(
            1.0,
            Factor(vec![Primitive::Sin {
                freq: 2.0,
                phase: 0.0,
            }]),
            vec![Factor::one()],
        );
        let v = fd_oracle(&f, &[2, 0], &[0.0, 0.5], 0.01, &d).unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn stencil_leaving_domain_is_an_error() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let f = TestField::zero(1);
        assert_eq!(
            fd_oracle(&f, &[0, 4], &[0.5, 0.02], 0.01, &d),
            Err(Error::StencilOutOfDomain { axis: 1 })
        );
    }
}
