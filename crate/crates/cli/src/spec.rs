//! Textual specs for weights, analytic symbols, test functions and points.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use b2disc::bloch::{build_counterexample, AnalyticFunction, SequenceSpec};
use b2disc::weights::{Weight, WeightGrid};
use b2disc::DiskPoint;
use num_complex::Complex64;

fn num(key: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().with_context(|| format!("{key}: `{s}` is not a number"))
}

fn count(key: &str, s: &str) -> Result<usize> {
    s.trim().parse::<usize>().with_context(|| format!("{key}: `{s}` is not a count"))
}

/// `one`, `radial:A`, `radial-log:C`, `point:S:ANGLE`, `exp:[K:]G`, `grid:PATH`.
pub fn weight(key: &str, spec: &str) -> Result<Weight> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "one" => Ok(Weight::one()),
        // `radial-log:c` names the log c·log(1 − |z|²) of the same weight
        "radial" | "radial-log" => Ok(Weight::radial(num(key, rest)?)),
        "point" => {
            let (s, angle) = rest.split_once(':').ok_or_else(|| anyhow!("{key}: expected point:S:ANGLE"))?;
            Ok(Weight::point(num(key, s)?, num(key, angle)?))
        }
        "exp" => {
            let (scale, g) = match rest.split_once(':') {
                Some((k, g)) if k.parse::<f64>().is_ok() => (num(key, k)?, g),
                _ => (1.0, rest),
            };
            Ok(Weight::exp_harmonic(analytic(key, g)?, Complex64::new(scale, 0.0)))
        }
        "grid" => {
            let grid = WeightGrid::load(Path::new(rest)).with_context(|| format!("{key}: cannot load `{rest}`"))?;
            grid.validate().with_context(|| format!("{key}: `{rest}`"))?;
            Ok(Weight::GridSampled { grid: Arc::new(grid) })
        }
        _ => bail!("{key}: unknown weight `{spec}`; expected one, radial:A, radial-log:C, point:S:ANGLE, exp:[K:]G or grid:PATH"),
    }
}

/// `z`, `neg-log`, `dyadic:N`, `factorial:K`, `super-lacunary:K`,
/// `poly:c0,c1,…`, `lacunary:n1,n2,…`, `scaled:K:G`.
pub fn analytic(key: &str, spec: &str) -> Result<AnalyticFunction> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let c = |x: f64| Complex64::new(x, 0.0);
    match kind {
        "z" => Ok(AnalyticFunction::identity()),
        "neg-log" => Ok(AnalyticFunction::neg_log_one_minus()),
        "dyadic" => Ok(AnalyticFunction::dyadic_harmonic(count(key, rest)? as u32)),
        "factorial" | "super-lacunary" => Ok(build_counterexample(&sequence(key, kind)?, count(key, rest)?)?),
        "poly" => {
            let coeffs = rest.split(',').map(|x| num(key, x).map(c)).collect::<Result<Vec<_>>>()?;
            Ok(AnalyticFunction::polynomial(coeffs))
        }
        "lacunary" => {
            let n = rest
                .split(',')
                .map(|x| x.trim().parse::<u64>().with_context(|| format!("{key}: `{x}` is not an exponent")))
                .collect::<Result<Vec<_>>>()?;
            Ok(AnalyticFunction::lacunary(vec![c(1.0); n.len()], n)?)
        }
        "scaled" => {
            let (k, g) = rest.split_once(':').ok_or_else(|| anyhow!("{key}: expected scaled:K:G"))?;
            Ok(analytic(key, g)?.scaled(c(num(key, k)?)))
        }
        _ => bail!("{key}: unknown symbol `{spec}`; expected z, neg-log, dyadic:N, factorial:K, super-lacunary:K, poly:…, lacunary:… or scaled:K:G"),
    }
}

/// `factorial`, `super-lacunary` or `custom:n1,n2,…`.
pub fn sequence(key: &str, spec: &str) -> Result<SequenceSpec> {
    match spec.split_once(':') {
        None if spec == "factorial" => Ok(SequenceSpec::Factorial),
        None if spec == "super-lacunary" => Ok(SequenceSpec::SuperLacunary),
        Some(("custom", rest)) => {
            let n = rest
                .split(',')
                .map(|x| x.trim().parse::<u64>().with_context(|| format!("{key}: `{x}` is not an exponent")))
                .collect::<Result<Vec<_>>>()?;
            Ok(SequenceSpec::Custom(n))
        }
        _ => bail!("{key}: unknown sequence `{spec}`; expected factorial, super-lacunary or custom:n1,n2,…"),
    }
}

pub type TestFunction = Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// `abs2`, `conj`, `analytic:G` or `log-weight:W`.
pub fn function(key: &str, spec: &str) -> Result<TestFunction> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "abs2" => Ok(Box::new(|z: Complex64| Complex64::new(z.norm_sqr(), 0.0))),
        "conj" => Ok(Box::new(|z: Complex64| z.conj())),
        "analytic" => {
            let g = analytic(key, rest)?;
            Ok(Box::new(move |z| g.eval(z)))
        }
        "log-weight" => {
            let w = weight(key, rest)?;
            Ok(Box::new(move |z| Complex64::new(w.log_eval(z), 0.0)))
        }
        _ => bail!("{key}: unknown function `{spec}`; expected abs2, conj, analytic:G or log-weight:W"),
    }
}

/// `re,im`.
pub fn point(key: &str, spec: &str) -> Result<DiskPoint> {
    let (re, im) = spec.split_once(',').ok_or_else(|| anyhow!("{key}: expected `re,im`, got `{spec}`"))?;
    DiskPoint::new(num(key, re)?, num(key, im)?).with_context(|| format!("{key}: `{spec}`"))
}

/// `re,im;re,im;…`.
pub fn points(key: &str, spec: &str) -> Result<Vec<DiskPoint>> {
    spec.split(';').filter(|s| !s.trim().is_empty()).map(|s| point(key, s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_parse() {
        let z = Complex64::new(0.3, 0.1);
        assert_eq!(weight("w", "radial:0.5").unwrap().log_eval(z), Weight::radial(0.5).log_eval(z));
        assert_eq!(weight("w", "radial-log:-1").unwrap().log_eval(z), Weight::radial(-1.0).log_eval(z));
        assert_eq!(weight("w", "point:1:0.5").unwrap().log_eval(z), Weight::point(1.0, 0.5).log_eval(z));
        let e = weight("w", "exp:2:z").unwrap();
        assert!((e.log_eval(z) - 0.6).abs() < 1e-15);
        assert!(
            (weight("w", "exp:dyadic:3").unwrap().log_eval(z) - AnalyticFunction::dyadic_harmonic(3).eval(z).re).abs()
                < 1e-15
        );
        let err = weight("weight", "radial:x").unwrap_err().to_string();
        assert!(err.starts_with("weight:"), "{err}");
        assert!(weight("weight", "nope").is_err());
    }

    #[test]
    fn symbols_parse() {
        let z = Complex64::new(0.2, -0.4);
        let p = analytic("g", "poly:1,2").unwrap();
        assert!((p.eval(z) - (1.0 + 2.0 * z)).norm() < 1e-15);
        let s = analytic("g", "scaled:2:neg-log").unwrap();
        assert!((s.eval(z) + 2.0 * (1.0 - z).ln()).norm() < 1e-14);
        assert!(analytic("g", "factorial:10").is_ok());
        assert!(analytic("g", "factorial:40").is_err());
        assert_eq!(sequence("spec", "custom:2,6,24").unwrap(), SequenceSpec::Custom(vec![2, 6, 24]));
    }

    #[test]
    fn points_parse() {
        let p = points("points", "0,0;0.5,-0.25").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].z(), Complex64::new(0.5, -0.25));
        assert!(points("points", "1,0").is_err());
    }
}
