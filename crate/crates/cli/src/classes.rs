//! `classes --check NAME [ARG]`: named classes and their certificates.

use clap::{Args, ValueEnum};
use serde_json::json;
use sullivan_core::complex::BuildOptions;
use sullivan_core::ops::{self, evaluate, DualNumbers, Tensor};
use sullivan_core::verify::{is_primitive, Check};
use sullivan_core::{build_complex, homology, is_boundary, Chain, Component, Flavor, HomologyGroup};

use crate::{Failure, Format, Report};

#[derive(Args, Clone)]
pub struct ClassSpec {
    #[arg(long, value_enum)]
    check: ClassCheck,
    /// `m`, or a comma-separated list `c_1,…,c_m` for `omega-composed`.
    arg: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Row)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassCheck {
    /// `ζ^m` generates `H_{m−1}(SD_0^m)`.
    ZetaGenerates,
    /// `μ̃_m − ω̃_m` bounds in `SD̃_{0,m}`.
    MuOmegaHomologous,
    /// `μ̃_m` is a cycle with value `1⊗x^{2m−1}`.
    Mu,
    /// `ω̃_m` is a cycle with value `1⊗x^{2m−1}`.
    Omega,
    /// `γ̃` is a cycle with value `2(1⊗x^3)`.
    Gamma,
    /// `ζ̃_m` is not a cycle.
    ZetaTilde,
    /// `Ω̃_{(c_1,…,c_m)}` is a cycle with value `±1⊗x^{2Σc−1}`.
    #[value(name = "Omega")]
    OmegaComposed,
    /// `Γ̃_m` is a cycle with value `±2^m(1⊗x^{4m−1})`.
    #[value(name = "Gamma")]
    GammaComposed,
}

fn number(arg: &Option<String>, min: usize) -> Result<usize, Failure> {
    let s = arg.as_deref().ok_or_else(|| Failure::validation("this check takes an argument m"))?;
    let m: usize = s.trim().parse().map_err(|_| Failure::validation(format!("not a number: {s}")))?;
    if m < min {
        return Err(Failure::validation(format!("m must be at least {min}")));
    }
    Ok(m)
}

fn list(arg: &Option<String>) -> Result<Vec<usize>, Failure> {
    let s = arg.as_deref().ok_or_else(|| Failure::validation("this check takes a list c_1,…,c_m"))?;
    let cs = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Failure::validation(format!("not a number: {t}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if cs.iter().any(|&c| c < 2) {
        return Err(Failure::validation("every c_i must be at least 2"));
    }
    Ok(cs)
}

fn one_then_x(k: usize) -> Tensor {
    let mut w = vec![DualNumbers::ONE];
    w.extend(std::iter::repeat_n(DualNumbers::X, k));
    Tensor::word(&w)
}

fn cycle_check(name: &str, c: &Chain) -> Check {
    let b = c.boundary();
    Check::new(format!("{name} is a cycle"), b.is_zero(), format!("{} cells, ∂ has {} terms", c.len(), b.len()))
}

/// Evaluates on `x^{⊗leaves}` and compares the reduced value with `±k·1⊗x^{len}`.
fn value_check(name: &str, c: &Chain, leaves: usize, k: i64, len: usize) -> Result<Check, Failure> {
    let a = DualNumbers;
    let v = evaluate(&a, c, &vec![DualNumbers::x(); leaves])?.reduced(&a);
    let e = one_then_x(len).scaled(k);
    let pass = v == e || v == e.scaled(-1);
    Ok(Check::new(format!("{name} on x^{leaves}"), pass, v.display(&a)))
}

fn checks(spec: &ClassSpec) -> Result<Vec<Check>, Failure> {
    let mut out = Vec::new();
    match spec.check {
        ClassCheck::ZetaGenerates => {
            let m = number(&spec.arg, 1)?;
            let c = build_complex(Component::new(Flavor::UnparUnen, 0, m), BuildOptions::default())?;
            let h = homology(&c)?;
            let z = Chain::from_diagram(ops::zeta(m, Flavor::UnparUnen)?);
            out.push(cycle_check(&format!("ζ^{m}"), &z));
            let top = h.get(m - 1).cloned().unwrap_or_default();
            out.push(Check::new(format!("H_{}(SD_0^{m}) = Z", m - 1), top == HomologyGroup::free(1), top.to_string()));
            let p = z.boundary().is_zero() && is_primitive(&c, &z)?;
            let detail = if p { "a cocycle takes the value 1 on ζ" } else { "no cocycle takes the value 1 on ζ" };
            out.push(Check::new(format!("ζ^{m} generates"), p, detail));
        }
        ClassCheck::MuOmegaHomologous => {
            let m = number(&spec.arg, 2)?;
            let c = build_complex(Component::new(Flavor::ParEnum, 0, m), BuildOptions::default())?;
            let x = &ops::mu(m)? - &ops::omega(m)?;
            let w = is_boundary(&x, &c)?;
            let detail = match &w {
                Some(y) => y.terms().map(|(d, k)| format!("{k:+} [{}]", d.to_text())).collect::<Vec<_>>().join(" "),
                None => "no witness".into(),
            };
            out.push(Check::new(format!("μ̃_{m} − ω̃_{m} = ∂y"), w.is_some_and(|y| y.boundary() == x), detail));
        }
        ClassCheck::Mu => {
            let m = number(&spec.arg, 1)?;
            let c = ops::mu(m)?;
            out.push(cycle_check(&format!("μ̃_{m}"), &c));
            out.push(value_check(&format!("μ̃_{m}"), &c, m, 1, 2 * m - 1)?);
        }
        ClassCheck::Omega => {
            let m = number(&spec.arg, 2)?;
            let c = ops::omega(m)?;
            out.push(cycle_check(&format!("ω̃_{m}"), &c));
            out.push(value_check(&format!("ω̃_{m}"), &c, m, 1, 2 * m - 1)?);
        }
        ClassCheck::Gamma => {
            let c = ops::gamma()?;
            out.push(cycle_check("γ̃", &c));
            out.push(value_check("γ̃", &c, 1, 2, 3)?);
        }
        ClassCheck::ZetaTilde => {
            let m = number(&spec.arg, 2)?;
            let b = Chain::from_diagram(ops::zeta(m, Flavor::ParEnum)?).boundary();
            out.push(Check::new(format!("ζ̃_{m} is not a cycle"), !b.is_zero(), format!("∂ has {} terms", b.len())));
        }
        ClassCheck::OmegaComposed => {
            let cs = list(&spec.arg)?;
            let c = ops::big_omega(&cs)?;
            let name = format!("Ω̃_({})", cs.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
            let total: usize = cs.iter().sum();
            out.push(cycle_check(&name, &c));
            out.push(value_check(&name, &c, total, 1, 2 * total - 1)?);
        }
        ClassCheck::GammaComposed => {
            let m = number(&spec.arg, 1)?;
            let c = ops::big_gamma(m)?;
            out.push(cycle_check(&format!("Γ̃_{m}"), &c));
            let k = 1i64.checked_shl(m as u32).ok_or_else(|| Failure::validation("m too large"))?;
            out.push(value_check(&format!("Γ̃_{m}"), &c, m, k, 4 * m - 1)?);
        }
    }
    Ok(out)
}

pub fn run(spec: &ClassSpec) -> Result<Report, Failure> {
    let checks = checks(spec)?;
    let failed = checks.iter().filter(|k| !k.pass).map(|k| k.name.clone()).collect();
    let text = match spec.format {
        Format::Json => {
            let v = json!({ "schema": "sullivan.classes/1", "pass": checks.iter().all(|k| k.pass), "checks": checks });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
        }
        Format::Csv => {
            let mut out = String::from("check,pass,detail\n");
            for k in &checks {
                out.push_str(&format!("{},{},{}\n", crate::output::csv_field(&k.name), k.pass, crate::output::csv_field(&k.detail)));
            }
            out
        }
        Format::Row => checks
            .iter()
            .map(crate::output::check_line)
            .collect(),
    };
    Ok(Report { text, failed })
}
