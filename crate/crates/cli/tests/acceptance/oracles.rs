//! Direct per-cell evaluations used as references for the library routines.

use nalgebra::{DMatrix, DVector};

pub fn rca(f: &DMatrix<f64>) -> DMatrix<f64> {
    let (nc, ni) = f.shape();
    let mut total = 0.0;
    for c in 0..nc {
        for i in 0..ni {
            total += f[(c, i)];
        }
    }
    DMatrix::from_fn(nc, ni, |c, i| {
        let mut city = 0.0;
        for k in 0..ni {
            city += f[(c, k)];
        }
        let mut ind = 0.0;
        for k in 0..nc {
            ind += f[(k, i)];
        }
        if f[(c, i)] == 0.0 {
            0.0
        } else {
            (f[(c, i)] / city) / (ind / total)
        }
    })
}

/// Density over cities' missing industries and the resulting potential.
pub fn density_and_cp(rca: &DMatrix<f64>, e: &DMatrix<f64>, ci: &[f64]) -> (DMatrix<f64>, Vec<f64>) {
    let (nc, ni) = rca.shape();
    let w = |i: usize, j: usize| e[(i, j)].max(0.0);
    let mut dens = DMatrix::zeros(nc, ni);
    let mut cp = vec![0.0; nc];
    for c in 0..nc {
        let mut sum = 0.0;
        let mut count = 0;
        for i in 0..ni {
            if rca[(c, i)] >= 1.0 {
                continue;
            }
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..ni {
                den += w(i, j);
                if rca[(c, j)] > 1.0 {
                    num += w(i, j);
                }
            }
            let d = if den == 0.0 { 0.0 } else { num / den };
            dens[(c, i)] = d;
            sum += d * ci[i];
            count += 1;
        }
        cp[c] = if count == 0 { 0.0 } else { sum / count as f64 };
    }
    (dens, cp)
}

pub struct OlsOracle {
    pub coef: Vec<f64>,
    pub se_hc1: Vec<f64>,
    pub r2: f64,
    pub aic: f64,
    pub bic: f64,
    /// One per non-intercept column.
    pub vif: Vec<f64>,
}

fn normal_equations(x: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let xtx = x.transpose() * x;
    let inv = xtx.try_inverse().expect("full rank design");
    let b = &inv * x.transpose() * y;
    (b, inv)
}

fn centered_r2(x: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let (b, _) = normal_equations(x, y);
    let resid = y - x * b;
    let ybar = y.mean();
    let tss: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
    1.0 - resid.norm_squared() / tss
}

/// `x` has the intercept in column 0.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> OlsOracle {
    let (n, k) = x.shape();
    let (b, inv) = normal_equations(x, y);
    let e = y - x * &b;
    let mut meat = DMatrix::zeros(k, k);
    for r in 0..n {
        let xr = x.row(r).transpose();
        meat += &xr * xr.transpose() * e[r].powi(2);
    }
    let v = &inv * meat * &inv * (n as f64 / (n - k) as f64);
    let rss = e.norm_squared();
    let nf = n as f64;
    let vif = (1..k)
        .map(|j| {
            let others: Vec<usize> = (0..k).filter(|&c| c != j).collect();
            let xo = x.select_columns(&others);
            let yj = x.column(j).into_owned();
            1.0 / (1.0 - centered_r2(&xo, &yj))
        })
        .collect();
    OlsOracle {
        coef: b.iter().copied().collect(),
        se_hc1: (0..k).map(|j| v[(j, j)].sqrt()).collect(),
        r2: centered_r2(x, y),
        aic: nf * (rss / nf).ln() + 2.0 * k as f64,
        bic: nf * (rss / nf).ln() + k as f64 * nf.ln(),
        vif,
    }
}

pub fn theil(w: &[f64]) -> f64 {
    let n = w.len() as f64;
    let mu = w.iter().sum::<f64>() / n;
    w.iter().map(|x| (x / mu) * (x / mu).ln()).sum::<f64>() / n
}
