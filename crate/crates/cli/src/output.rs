//! Formatting of homology tables and check reports, and the check suite of
//! `verify`.

use serde_json::json;
use sullivan_core::complex::{quotient, BuildOptions};
use sullivan_core::ops::maps::check_transfer;
use sullivan_core::verify::{component_checks, splitting_report, stabilization_report, Check, VerifyError};
use sullivan_core::{build_complex, homology, ChainComplex, Component, Flavor, HomologyGroup};

use crate::Format;

const HOMOLOGY_SCHEMA: &str = "sullivan.homology/1";
const VERIFY_SCHEMA: &str = "sullivan.verify/1";

fn component_json(c: Component) -> serde_json::Value {
    json!({ "flavor": c.flavor.tag(), "g": c.g, "m": c.m })
}

/// Degrees whose homology is that of the full component.
fn exact(c: &ChainComplex, h: &[HomologyGroup]) -> usize {
    h.len().min(c.exact_through() + 1)
}

pub fn homology_table(c: &ChainComplex, h: &[HomologyGroup], format: Format) -> String {
    let h = &h[..exact(c, h)];
    match format {
        Format::Csv => {
            let mut out = String::from("degree,betti,torsion\n");
            for (k, g) in h.iter().enumerate() {
                let t: Vec<String> = g.torsion.iter().map(u64::to_string).collect();
                out.push_str(&format!("{k},{},{}\n", g.betti, t.join(";")));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = h
                .iter()
                .enumerate()
                .map(|(k, g)| json!({ "degree": k, "betti": g.betti, "torsion": g.torsion }))
                .collect();
            let v = json!({
                "schema": HOMOLOGY_SCHEMA,
                "component": component_json(c.component),
                "cells": c.counts(),
                "exact_through": c.exact_through(),
                "homology": rows,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
        }
        Format::Row => {
            let row: Vec<String> = h.iter().map(ToString::to_string).collect();
            format!("{}\n", row.join(","))
        }
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn checks(c: &ChainComplex, checks: &[Check], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("check,pass,detail\n");
            for k in checks {
                out.push_str(&format!("{},{},{}\n", csv_field(&k.name), k.pass, csv_field(&k.detail)));
            }
            out
        }
        Format::Json => {
            let v = json!({
                "schema": VERIFY_SCHEMA,
                "component": component_json(c.component),
                "pass": checks.iter().all(|k| k.pass),
                "checks": checks,
            });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json values serialize"))
        }
        Format::Row => checks
            .iter()
            .map(crate::output::check_line)
            .collect(),
    }
}

fn enumerated(f: Flavor) -> Flavor {
    match f {
        Flavor::UnparUnen => Flavor::UnparEnum,
        Flavor::ParUnen => Flavor::ParEnum,
        f => f,
    }
}

/// The standard checks, plus the stabilization quotient for enumerated
/// components of positive genus, the transfer for unenumerated components
/// with at most four leaves and the splitting along `B_2` for `SD_0^m`.
pub fn verify_checks(c: &ChainComplex, opts: &BuildOptions) -> Result<Vec<Check>, VerifyError> {
    let h = homology(c)?;
    let mut out = component_checks(c, &h)?;
    let comp = c.component;
    let name = |s: &str| format!("{s} {comp}");

    if comp.flavor.is_enumerated() && comp.g >= 1 {
        let r = stabilization_report(c)?;
        let bound = comp.m + comp.g - 2;
        let lowest = r.lowest_essential();
        out.push(Check::new(
            name("stabilization essentials"),
            lowest.is_none_or(|k| k >= bound),
            format!("lowest essential degree {lowest:?}, bound {bound}"),
        ));
        let through = (comp.m + comp.g).saturating_sub(3);
        out.push(Check::new(
            name("stabilization homology"),
            comp.m + comp.g < 3 || r.vanishes_through(through),
            format!("quotient homology {}", show(&r.homology)),
        ));
    }

    if !comp.flavor.is_enumerated() && comp.m <= 4 {
        let cover = build_complex(Component::new(enumerated(comp.flavor), comp.g, comp.m), *opts)?;
        let u = quotient(c, |d| d.degenerate_count() >= 2)?;
        let e = quotient(&cover, |d| d.degenerate_count() >= 2)?;
        let r = check_transfer(&u.complex, &e.complex)?;
        out.push(Check::new(
            name("transfer"),
            r.chain_map && r.section,
            format!("{} sheets, {} cells{}", r.sheets, r.cells, r.witness.map(|w| format!(", at {w}")).unwrap_or_default()),
        ));
    }

    if comp.flavor == Flavor::UnparUnen && comp.g == 0 && comp.m <= 4 && c.exact_through() + 1 >= c.len() {
        let r = splitting_report(c)?;
        out.push(Check::new(
            name("splitting along B_2"),
            r.pass(),
            format!(
                "contained {}, differentials agree {}, extra degenerate {}, projection chain map {}",
                r.contained, r.differentials_agree, r.extra_degenerate, r.projection_chain_map
            ),
        ));
    }
    Ok(out)
}

pub fn check_line(k: &Check) -> String {
    let verdict = if k.pass { "PASS" } else { "FAIL" };
    if k.detail.is_empty() {
        format!("{verdict} {}\n", k.name)
    } else {
        format!("{verdict} {}: {}\n", k.name, k.detail)
    }
}

pub fn show(h: &[HomologyGroup]) -> String {
    h.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
