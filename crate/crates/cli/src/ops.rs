//! One function per subcommand. Each returns CSV bytes, optional text for
//! standard output, and a JSON summary for the manifest.

use std::collections::BTreeMap;

use bergman_shift::asymptotics::{
    cesaro_bound_check, cesaro_moment, laurent_ratio, relative_cesaro_moments, relative_h_profile,
    relative_ratio_difference, relative_weak_moments, weak_moment, ComparisonReport, ComparisonRow,
};
use bergman_shift::coefficients::{universal_circle_sequence, universal_jacobi_pair};
use bergman_shift::polynomials::{
    evaluate_batch, ratio, write_batch_csv, BatchQuantity, BatchRequest, BatchRow, PointGrid,
};
use bergman_shift::report::{fmt_f64, write_csv};
use bergman_shift::rightlimits::{
    best_match_distance, detect_right_limit, normalized_ratio_difference, right_limit_difference,
    SubsequenceSpec,
};
use bergman_shift::zeros::zeros;
use bergman_shift::{
    alexandrov, degenerate_pair, strip, Complex64, HessenbergTruncation, Model, VerblunskySequence,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{config, CliError};
use crate::params::{ComplexArg, Family, MomentSelection, PaperExample, Params, Quantity};

type Res<T> = Result<T, CliError>;

pub const DEFAULT_POINTS: usize = 64;
pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_TERMS: usize = 30;

pub struct Output {
    pub csv: Vec<u8>,
    pub text: Option<String>,
    pub summary: Value,
}

/// Parameters plus a record of every value actually used.
pub struct Ctx {
    pub p: Params,
    pub resolved: BTreeMap<String, Value>,
    pub defaults: BTreeMap<String, Value>,
}

impl Ctx {
    pub fn new(p: Params) -> Self {
        Self {
            p,
            resolved: BTreeMap::new(),
            defaults: BTreeMap::new(),
        }
    }

    fn record<T: Serialize>(&mut self, name: &str, v: &T) {
        self.resolved
            .insert(name.into(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    fn opt<T: Serialize>(&mut self, name: &str, v: Option<T>, default: T) -> T {
        let v = match v {
            Some(v) => v,
            None => {
                self.defaults.insert(
                    name.into(),
                    serde_json::to_value(&default).unwrap_or(Value::Null),
                );
                default
            }
        };
        self.record(name, &v);
        v
    }

    fn need<T: Serialize>(&mut self, name: &str, v: Option<T>) -> Res<T> {
        let v = v.ok_or_else(|| config(format!("missing parameter `{name}`")))?;
        self.record(name, &v);
        Ok(v)
    }

    fn model(&mut self, second: bool) -> Res<Model> {
        let (name, spec) = if second {
            ("model_b", self.p.model_b.clone())
        } else {
            ("model", self.p.model.clone())
        };
        Ok(self.need(name, spec)?.0.build()?)
    }

    /// The truncation size: `--size` or the smallest size that covers `needed`.
    fn size(&mut self, needed: usize) -> Res<usize> {
        let size = self.opt("size", self.p.size, needed.max(1));
        if size < needed {
            return Err(config(format!(
                "size {size} is too small; this run needs at least {needed}"
            )));
        }
        Ok(size)
    }

    fn truncation(&mut self, model: &Model, size: usize) -> Res<HessenbergTruncation> {
        if let Some(max) = model.max_size() {
            if size > max {
                return Err(config(format!(
                    "the model supports truncations up to {max}, {size} requested"
                )));
            }
        }
        Ok(model.truncation(size)?)
    }

    fn radius(&mut self, truncs: &[&HessenbergTruncation]) -> f64 {
        let r_est = truncs.iter().fold(0.0f64, |m, t| m.max(t.norm_bound()));
        self.record("R_est", &r_est);
        self.opt("radius", self.p.radius, 2.0 * r_est)
    }

    fn points(&mut self) -> usize {
        self.opt("points", self.p.points, DEFAULT_POINTS)
    }

    fn n_list(&mut self) -> Res<Vec<usize>> {
        let ns = match (self.p.n_grid.clone(), self.p.n) {
            (Some(g), _) => {
                self.record("n_grid", &g);
                g
            }
            (None, Some(n)) => {
                self.record("n", &n);
                vec![n]
            }
            (None, None) => return Err(config("missing parameter `n` or `n_grid`")),
        };
        if ns.is_empty() {
            return Err(config("`n_grid` is empty"));
        }
        Ok(ns)
    }

    fn sub(&mut self, name: &str, text: Option<String>) -> Res<SubsequenceSpec> {
        Ok(SubsequenceSpec::parse(&self.need(name, text)?)?)
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> bergman_shift::Result<()>) -> Res<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Largest index a subsequence can reach, if it is bounded.
fn sub_end(sub: &SubsequenceSpec) -> Option<usize> {
    match sub {
        SubsequenceSpec::Explicit { indices } => indices.last().copied(),
        SubsequenceSpec::Arithmetic { end, .. } => *end,
    }
}

pub fn build_matrix(ctx: &mut Ctx) -> Res<Output> {
    let model = ctx.model(false)?;
    let size = ctx.need("size", ctx.p.size)?;
    let t = ctx.truncation(&model, size)?;
    Ok(Output {
        csv: csv_bytes(|w| t.write_csv(w))?,
        text: None,
        summary: json!({
            "header": t.header(),
            "orthogonality_residual": t.orthogonality_residual(),
        }),
    })
}

pub fn ratio_cmd(ctx: &mut Ctx) -> Res<Output> {
    let model = ctx.model(false)?;
    let ns = ctx.n_list()?;
    let normalized = ctx.opt("normalized", ctx.p.normalized, false);
    let top = *ns.iter().max().unwrap();
    let size = ctx.size(if normalized { top + 1 } else { top })?;
    let t = ctx.truncation(&model, size)?;
    let mut rows = Vec::new();
    let mut text = None;
    if let Some(ComplexArg(z)) = ctx.p.z {
        ctx.record("z", &ComplexArg(z));
        let mut lines = String::new();
        for &n in &ns {
            let value = ratio(&t, n, z, normalized)?;
            lines.push_str(&bergman_shift::report::fmt_complex(value));
            lines.push('\n');
            rows.push(BatchRow { n, z, value });
        }
        text = Some(lines);
    } else {
        let radius = ctx.radius(&[&t]);
        let points = ctx.points();
        let quantity = if normalized {
            BatchQuantity::NormalizedRatio
        } else {
            BatchQuantity::Ratio
        };
        for &n in &ns {
            let req = BatchRequest {
                n_min: n,
                n_max: n,
                grid: PointGrid::Circle { radius, points },
                quantity,
            };
            rows.extend(evaluate_batch(&t, &req)?);
        }
    }
    let max_abs = rows.iter().fold(0.0f64, |m, r| m.max(r.value.norm()));
    Ok(Output {
        csv: csv_bytes(|w| write_batch_csv(w, &rows))?,
        text,
        summary: json!({ "rows": rows.len(), "max_abs": max_abs, "R_est": t.norm_bound() }),
    })
}

pub fn laurent(ctx: &mut Ctx) -> Res<Output> {
    let model = ctx.model(false)?;
    let n = ctx.need("n", ctx.p.n)?;
    let terms = ctx.opt("terms", ctx.p.terms, DEFAULT_TERMS);
    let size = ctx.size(n)?;
    let t = ctx.truncation(&model, size)?;
    let l = laurent_ratio(&t, n, terms)?;
    let radius = ctx.radius(&[&t]);
    let z = Complex64::new(radius, 0.0);
    let err = (ratio(&t, n, z, false)? - l.partial_sum(z)).norm();
    let csv = csv_bytes(|w| {
        write_csv(
            w,
            &["m", "re", "im"],
            l.coefficients
                .iter()
                .enumerate()
                .map(|(m, c)| [m.to_string(), fmt_f64(c.re), fmt_f64(c.im)]),
        )
    })?;
    Ok(Output {
        csv,
        text: None,
        summary: json!({
            "n": n,
            "terms": terms,
            "R_est": t.norm_bound(),
            "check_radius": radius,
            "partial_sum_error": err,
            "tail_bound": l.tail_bound(t.norm_bound(), z),
        }),
    })
}

pub fn moments(ctx: &mut Ctx) -> Res<Output> {
    let model = ctx.model(false)?;
    let ns = ctx.n_list()?;
    let j_max = ctx.opt("j_max", ctx.p.j_max, 4);
    let kind = ctx.opt("kind", ctx.p.kind, MomentSelection::Both);
    let top = *ns.iter().max().unwrap();
    let weak = kind != MomentSelection::Cesaro;
    let cesaro = kind != MomentSelection::Weak;
    let size = ctx.size(if weak { top + j_max } else { top })?;
    let t = ctx.truncation(&model, size)?;
    let mut rows = Vec::new();
    for &n in &ns {
        for j in 0..=j_max {
            if weak {
                rows.push(("weak", j, n, weak_moment(&t, j, n)?));
            }
            if cesaro {
                rows.push(("cesaro", j, n, cesaro_moment(&t, j, n)?));
            }
        }
    }
    let max_imag = rows.iter().fold(0.0f64, |m, r| m.max(r.3.im.abs()));
    let csv = csv_bytes(|w| {
        write_csv(
            w,
            &["kind", "j", "n", "re", "im"],
            rows.iter().map(|(k, j, n, v)| {
                [
                    k.to_string(),
                    j.to_string(),
                    n.to_string(),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                ]
            }),
        )
    })?;
    Ok(Output {
        csv,
        text: None,
        summary: json!({ "rows": rows.len(), "max_abs_imag": max_imag }),
    })
}

pub fn zeros_cmd(ctx: &mut Ctx) -> Res<Output> {
    let model = ctx.model(false)?;
    let ns = ctx.n_list()?;
    let size = ctx.size(*ns.iter().max().unwrap())?;
    let t = ctx.truncation(&model, size)?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &n in &ns {
        let zs = zeros(&t, n)?;
        summaries.push(zs.summary(&t)?);
        rows.extend(
            zs.zeros
                .iter()
                .enumerate()
                .map(|(i, z)| [n.to_string(), i.to_string(), fmt_f64(z.re), fmt_f64(z.im)]),
        );
    }
    Ok(Output {
        csv: csv_bytes(|w| write_csv(w, &["n", "index", "re", "im"], rows))?,
        text: None,
        summary: json!({ "sets": summaries }),
    })
}

pub fn right_limit(ctx: &mut Ctx) -> Res<Output> {
    let model = ctx.model(false)?;
    let sub = ctx.sub("sub", ctx.p.sub.clone())?;
    let m = ctx.opt("half_width", ctx.p.half_width, 2);
    let quantity = ctx.p.quantity;
    let end = sub_end(&sub);
    if ctx.p.model_b.is_none() {
        let epsilon = ctx.opt("epsilon", ctx.p.epsilon, DEFAULT_EPSILON);
        let size = ctx.size(end.map_or(0, |e| e + m))?;
        let t = ctx.truncation(&model, size)?;
        let est = detect_right_limit(&t, &sub, m, epsilon)?;
        let w = &est.window;
        let half = m as i64;
        let rows = (0..w.width()).flat_map(|r| {
            (0..w.width()).map(move |c| {
                let v = w.get(r, c);
                [
                    (r as i64 - half).to_string(),
                    (c as i64 - half).to_string(),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                ]
            })
        });
        let csv = csv_bytes(|out| write_csv(out, &["row", "col", "re", "im"], rows))?;
        return Ok(Output {
            csv,
            text: None,
            summary: json!({
                "center": est.window.center,
                "half_width": m,
                "dispersion": est.dispersion,
                "epsilon": epsilon,
                "converged": est.converged,
                "indices": est.indices.len(),
            }),
        });
    }
    let model_b = ctx.model(true)?;
    let sub_b = match ctx.p.sub_b.clone() {
        Some(s) => ctx.sub("sub_b", Some(s))?,
        None => sub.clone(),
    };
    let quantity = ctx.opt("quantity", quantity, Quantity::Windows);
    let end_b = sub_end(&sub_b);
    let (report, summary) = match quantity {
        Quantity::Windows => {
            let need = end.max(end_b).map_or(0, |e| e + m);
            let size = ctx.size(need)?;
            let a = ctx.truncation(&model, size)?;
            let b = ctx.truncation(&model_b, size)?;
            let d = right_limit_difference(&a, &b, &sub, &sub_b, m)?;
            let s = json!({ "tail_max": d.tail_max, "pairs": d.rows.len() });
            (d, s)
        }
        Quantity::NormalizedRatio => {
            let j_max = ctx.opt("j_max", ctx.p.j_max, 2);
            let need = end.max(end_b).map_or(0, |e| e + j_max + 1);
            let size = ctx.size(need)?;
            let a = ctx.truncation(&model, size)?;
            let b = ctx.truncation(&model_b, size)?;
            let radius = ctx.radius(&[&a, &b]);
            let points = ctx.points();
            let j = j_max as i64;
            let d = normalized_ratio_difference(&a, &b, &sub, &sub_b, -j..=j, radius, points)?;
            let s = json!({ "tail_max": d.tail_max, "rows": d.rows.len() });
            (d, s)
        }
        other => {
            return Err(config(format!(
                "right-limit supports quantity windows or normalized-ratio, not {other:?}"
            )))
        }
    };
    Ok(Output {
        csv: csv_bytes(|w| report.write_csv(w))?,
        text: None,
        summary,
    })
}

fn row(quantity: &str, j: i64, n: usize, value: Complex64, bound: Option<f64>) -> ComparisonRow {
    ComparisonRow {
        quantity: quantity.into(),
        j,
        n,
        value,
        bound,
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn report_output(report: ComparisonReport, extra: Value) -> Res<Output> {
    let csv = csv_bytes(|w| report.write_csv(w))?;
    let mut summary =
        serde_json::to_value(&report.summary).map_err(|e| CliError::Io(e.to_string()))?;
    if let (Value::Object(s), Value::Object(e)) = (&mut summary, extra) {
        s.extend(e);
    }
    Ok(Output {
        csv,
        text: None,
        summary,
    })
}

pub fn compare(ctx: &mut Ctx) -> Res<Output> {
    if let Some(example) = ctx.p.paper_example {
        ctx.record("paper_example", &example);
        return match example {
            PaperExample::Degenerate => degenerate_example(ctx),
            PaperExample::Alexandrov => alexandrov_example(ctx),
            PaperExample::Stripping => stripping_example(ctx),
        };
    }
    let a_model = ctx.model(false)?;
    let b_model = ctx.model(true)?;
    let quantity = ctx.opt("quantity", ctx.p.quantity, Quantity::H);
    let ns = ctx.n_list()?;
    let q = ctx.opt("q", ctx.p.q, 0);
    let top = *ns.iter().max().unwrap();
    let mut rows = Vec::new();
    match quantity {
        Quantity::H => {
            let j_max = ctx.opt("j_max", ctx.p.j_max, 3);
            let size = ctx.size(top)?;
            let a = ctx.truncation(&a_model, size)?;
            let b = ctx.truncation(&b_model, size)?;
            return report_output(relative_h_profile(&a, &b, q, j_max, &ns)?, json!({}));
        }
        Quantity::Weak | Quantity::Cesaro | Quantity::CesaroBound => {
            let j_max = ctx.opt("j_max", ctx.p.j_max, 3);
            let size = ctx.size(if quantity == Quantity::Cesaro {
                top
            } else {
                top + j_max
            })?;
            let a = ctx.truncation(&a_model, size)?;
            let b = ctx.truncation(&b_model, size)?;
            for j in 0..=j_max {
                for &n in &ns {
                    rows.push(match quantity {
                        Quantity::Weak => row(
                            "weak",
                            j as i64,
                            n,
                            relative_weak_moments(&a, &b, q, j, n)?,
                            None,
                        ),
                        Quantity::Cesaro => row(
                            "cesaro",
                            j as i64,
                            n,
                            relative_cesaro_moments(&a, &b, q, j, n)?,
                            None,
                        ),
                        _ => {
                            let c = cesaro_bound_check(&a, &b, j, n)?;
                            row("cesaro_bound", j as i64, n, real(c.lhs), Some(c.rhs))
                        }
                    });
                }
            }
        }
        Quantity::Ratio | Quantity::NormalizedRatio => {
            let normalized = quantity == Quantity::NormalizedRatio;
            let size = ctx.size(if normalized { top + 1 } else { top })?;
            let a = ctx.truncation(&a_model, size)?;
            let b = ctx.truncation(&b_model, size)?;
            let radius = ctx.radius(&[&a, &b]);
            let points = ctx.points();
            let name = if normalized {
                "normalized_ratio"
            } else {
                "ratio"
            };
            for &n in &ns {
                let d = relative_ratio_difference(&a, &b, q, n, radius, points, normalized)?;
                rows.push(row(name, 0, n, real(d), None));
            }
        }
        Quantity::Windows => {
            return Err(config(
                "compare does not support quantity windows; use right-limit",
            ))
        }
    }
    let violations = rows
        .iter()
        .filter(|r| r.bound.is_some_and(|b| r.value.re > b))
        .count();
    let extra = if quantity == Quantity::CesaroBound {
        json!({ "bound_violations": violations })
    } else {
        json!({})
    };
    report_output(ComparisonReport::new(rows, &ns, q), extra)
}

fn degenerate_example(ctx: &mut Ctx) -> Res<Output> {
    let n = ctx.opt("n", ctx.p.n, 500);
    let z = ctx
        .opt("z", ctx.p.z, ComplexArg(Complex64::new(2.0, 0.0)))
        .0;
    let size = ctx.size(n + 1)?;
    let (mu, nu) = degenerate_pair(size)?;
    let a = HessenbergTruncation::ggt(&mu, size)?;
    let b = HessenbergTruncation::ggt(&nu, size)?;
    let ra = ratio(&a, n, z, true)?;
    let rb = ratio(&b, n, z, true)?;
    let start = n.saturating_sub(100).max(1);
    let sub = SubsequenceSpec::Arithmetic {
        offset: start,
        stride: 1,
        end: Some(n),
    };
    let gap = right_limit_difference(&a, &b, &sub, &sub, 0)?;
    let target = 2.0 * 0.5f64.sin();
    let mut rows = vec![
        row("ratio_mu", 0, n, ra, None),
        row("ratio_nu", 0, n, rb, None),
    ];
    rows.extend(
        gap.rows
            .iter()
            .map(|r| row("diagonal_gap", 0, r.n_k, real(r.sup_diff), Some(target))),
    );
    report_output(
        ComparisonReport::new(rows, &[n], 0),
        json!({
            "ratio_mu_abs": ra.norm(),
            "ratio_nu_abs": rb.norm(),
            "diagonal_gap_tail": gap.tail_max,
            "diagonal_gap_limit": target,
        }),
    )
}

fn reciprocal_default(ctx: &mut Ctx) -> Res<VerblunskySequence> {
    match ctx.p.model.clone() {
        Some(_) => match ctx.model(false)? {
            Model::Verblunsky(s) => Ok(s),
            _ => Err(config("this example needs a Verblunsky model")),
        },
        None => {
            ctx.defaults
                .insert("model".into(), json!("verblunsky:kind=reciprocal"));
            Ok(VerblunskySequence::reciprocal(1.0, 2.0)?)
        }
    }
}

fn alexandrov_example(ctx: &mut Ctx) -> Res<Output> {
    let seq = reciprocal_default(ctx)?;
    let lambda = ctx
        .opt("lambda", ctx.p.lambda, ComplexArg(Complex64::i()))
        .0;
    let n = ctx.opt("n", ctx.p.n, 300);
    let m = ctx.opt("half_width", ctx.p.half_width, 2);
    let j_max = ctx.opt("j_max", ctx.p.j_max, 2);
    let size = ctx.size(n + m.max(j_max + 1))?;
    let a = HessenbergTruncation::ggt(&seq, size)?;
    let b = HessenbergTruncation::ggt(&alexandrov(&seq, lambda)?, size)?;
    let radius = ctx.radius(&[&a, &b]);
    let points = ctx.points();
    let windows_sub = SubsequenceSpec::Arithmetic {
        offset: m + 2,
        stride: 1,
        end: Some(n),
    };
    let windows = right_limit_difference(&a, &b, &windows_sub, &windows_sub, m)?;
    let ratio_start = n.saturating_sub(100).max(j_max + 2);
    let ratio_sub = SubsequenceSpec::Arithmetic {
        offset: ratio_start,
        stride: 10,
        end: Some(n),
    };
    let j = j_max as i64;
    let ratios =
        normalized_ratio_difference(&a, &b, &ratio_sub, &ratio_sub, -j..=j, radius, points)?;
    let mut rows: Vec<ComparisonRow> = windows
        .rows
        .iter()
        .map(|r| row("window_gap", 0, r.n_k, real(r.sup_diff), None))
        .collect();
    rows.extend(
        ratios
            .rows
            .iter()
            .map(|r| row("normalized_ratio", r.j, r.n_k, real(r.sup_diff), None)),
    );
    report_output(
        ComparisonReport::new(rows, &[n], 0),
        json!({ "window_gap_max": windows.rows.iter().fold(0.0f64, |x, r| x.max(r.sup_diff)), "normalized_ratio_tail": ratios.tail_max }),
    )
}

fn stripping_example(ctx: &mut Ctx) -> Res<Output> {
    let seq = reciprocal_default(ctx)?;
    let k = ctx.opt("strip", ctx.p.strip, 1);
    let n = ctx.opt("n", ctx.p.n, 300);
    let m = ctx.opt("half_width", ctx.p.half_width, 2);
    let epsilon = ctx.opt("epsilon", ctx.p.epsilon, DEFAULT_EPSILON);
    let sub = match ctx.p.sub.clone() {
        Some(s) => ctx.sub("sub", Some(s))?,
        None => SubsequenceSpec::Arithmetic {
            offset: k + m + 1,
            stride: 1,
            end: Some(n),
        },
    };
    let size = ctx.size(sub_end(&sub).unwrap_or(n) + m)?;
    let a = HessenbergTruncation::ggt(&seq, size)?;
    let b = HessenbergTruncation::ggt(&strip(&seq, k)?, size - k)?;
    let ea = detect_right_limit(&a, &sub, m, epsilon)?;
    let eb = detect_right_limit(&b, &sub.shifted_down(k)?, m, epsilon)?;
    let distance = ea.window.distance(&eb.window)?;
    let rows = vec![
        row(
            "dispersion_original",
            0,
            ea.window.center,
            real(ea.dispersion),
            Some(epsilon),
        ),
        row(
            "dispersion_stripped",
            0,
            eb.window.center,
            real(eb.dispersion),
            Some(epsilon),
        ),
        row("limit_distance", 0, ea.window.center, real(distance), None),
    ];
    report_output(
        ComparisonReport::new(rows, &[n], k),
        json!({ "converged_original": ea.converged, "converged_stripped": eb.converged, "limit_distance": distance }),
    )
}

pub fn random(ctx: &mut Ctx) -> Res<Output> {
    let seed = ctx
        .p
        .seed
        .ok_or_else(|| config("`random` requires --seed"))?;
    ctx.record("seed", &seed);
    let spec = ctx.need("model", ctx.p.model.clone())?.0;
    let target = ctx.model(true)?;
    let runs = ctx.opt("runs", ctx.p.runs, 1);
    let n = ctx.opt("n", ctx.p.n, 40);
    let k = ctx.opt("k", ctx.p.k, 40);
    let horizon = ctx.opt("horizon", ctx.p.horizon, 100_000);
    let points = ctx.points();
    let b = ctx.truncation(&target, n + 1)?;
    let mut rows = Vec::with_capacity(runs);
    let mut radius = None;
    for run in 0..runs {
        let mut s = spec.clone();
        s.seed = Some(seed.wrapping_add(run as u64));
        let model = s.build()?;
        let a = ctx.truncation(&model, horizon + 1)?;
        let r = match radius {
            Some(r) => r,
            None => {
                let r = ctx.radius(&[&a, &b]);
                radius = Some(r);
                r
            }
        };
        let best = best_match_distance(&a, &b, n, k, r, points, horizon)?;
        rows.push((run, s.seed.unwrap(), best));
    }
    let distances: Vec<f64> = rows.iter().map(|r| r.2.distance).collect();
    let csv = csv_bytes(|w| {
        write_csv(
            w,
            &["run", "seed", "distance", "index"],
            rows.iter().map(|(run, s, b)| {
                [
                    run.to_string(),
                    s.to_string(),
                    fmt_f64(b.distance),
                    b.index.to_string(),
                ]
            }),
        )
    })?;
    Ok(Output {
        csv,
        text: None,
        summary: json!({
            "runs": runs,
            "max_distance": distances.iter().fold(0.0f64, |m, d| m.max(*d)),
            "min_distance": distances.iter().fold(f64::INFINITY, |m, d| m.min(*d)),
        }),
    })
}

pub fn universal(ctx: &mut Ctx) -> Res<Output> {
    let family = ctx.opt("family", ctx.p.family, Family::Circle);
    let base: Vec<Complex64> = ctx
        .need("base", ctx.p.base.clone())?
        .into_iter()
        .map(|c| c.0)
        .collect();
    let length = ctx.opt("length", ctx.p.length, 100);
    let csv = match family {
        Family::Circle => {
            let seq = universal_circle_sequence(&base, length)?;
            csv_bytes(|w| seq.write_csv(w, length))?
        }
        Family::Jacobi => {
            if base.iter().any(|z| z.im != 0.0) {
                return Err(config("jacobi base values must be real"));
            }
            let a: Vec<f64> = base.iter().map(|z| z.re).collect();
            let b = ctx.need("base_b", ctx.p.base_b.clone())?;
            let seq = universal_jacobi_pair(&a, &b, length)?;
            csv_bytes(|w| seq.write_csv(w, length))?
        }
    };
    Ok(Output {
        csv,
        text: None,
        summary: json!({ "family": family, "length": length, "base_size": base.len() }),
    })
}
