//! Reproduction of the Type I and Type II bound tables from a rows file.
//!
//! A rows file has one curve per line: `a[,r]` for Type I or `a,b[,r]` for Type II, where
//! the optional rank `r` is either an integer or a range `lo..hi`. Text after `#` is
//! ignored. Rows are evaluated in parallel and written back in input order.

use std::io::Write;

use cubic_selmer::classgroup::ClassGroupEngine;
use cubic_selmer::{Error, Result};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::report::{analyze_type1, analyze_type2, RankSpec, Type1Args, Type2Args};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Type1,
    Type2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowInput {
    pub a: BigInt,
    pub b: Option<BigInt>,
    pub rank: Option<RankSpec>,
}

pub fn parse_rows(text: &str, which: Which) -> Result<Vec<RowInput>> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::InvalidInput(format!("rows line {}: {msg}", lineno + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let int = |s: &str| s.parse::<BigInt>().map_err(|e| bad(format!("{s:?}: {e}")));
        let rank = |s: Option<&&str>| s.map(|t| t.parse::<RankSpec>().map_err(bad)).transpose();
        let row = match (which, fields.len()) {
            (Which::Type1, 1 | 2) => RowInput {
                a: int(fields[0])?,
                b: None,
                rank: rank(fields.get(1))?,
            },
            (Which::Type2, 2 | 3) => RowInput {
                a: int(fields[0])?,
                b: Some(int(fields[1])?),
                rank: rank(fields.get(2))?,
            },
            _ => return Err(bad(format!("unexpected number of fields in {line:?}"))),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Format a list of primes as `{p, q}`, or `∅` when empty.
pub fn format_set(items: &[String]) -> String {
    if items.is_empty() {
        "∅".to_string()
    } else {
        format!("{{{}}}", items.join(","))
    }
}

/// One output row of the Type I table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    pub a: String,
    #[serde(rename = "S_a")]
    pub s_a: String,
    #[serde(rename = "S_a(Q)")]
    pub s_a_q: String,
    #[serde(rename = "S_{aα²}(Q)")]
    pub s_aalpha2_q: String,
    #[serde(rename = "|S_a(L)|")]
    pub size_s_a_l: String,
    #[serde(rename = "h³_{S_a(L)}")]
    pub h3: String,
    pub r: String,
    #[serde(rename = "s^φ_l")]
    pub s_phi_l: String,
    #[serde(rename = "s^φ_u")]
    pub s_phi_u: String,
    #[serde(rename = "s³_l")]
    pub s3_l: String,
    #[serde(rename = "s³_u")]
    pub s3_u: String,
    pub error: String,
}

/// One output row of the Type II table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2Row {
    pub a: String,
    pub b: String,
    #[serde(rename = "S₁")]
    pub s1: String,
    #[serde(rename = "S₂")]
    pub s2: String,
    #[serde(rename = "S₃")]
    pub s3: String,
    #[serde(rename = "h³_{S₁,₂(L)}")]
    pub h12: String,
    #[serde(rename = "h³_{S₁,₃(L)}")]
    pub h13: String,
    pub r: String,
    #[serde(rename = "s^Ψ_l")]
    pub s_psi_l: String,
    #[serde(rename = "s^Ψ_u")]
    pub s_psi_u: String,
    #[serde(rename = "s³_l")]
    pub s3_l: String,
    #[serde(rename = "s³_u")]
    pub s3_u: String,
    pub error: String,
}

fn rank_text(rank: Option<RankSpec>) -> String {
    rank.map_or_else(String::new, |r| r.to_string())
}

pub fn table1_row(
    engine: &ClassGroupEngine,
    a: &BigInt,
    rank: Option<RankSpec>,
) -> Result<Table1Row> {
    let t = analyze_type1(
        engine,
        &Type1Args {
            a: a.clone(),
            rank,
            ..Default::default()
        },
    )?;
    Ok(Table1Row {
        a: a.to_string(),
        s_a: format_set(&t.s_a),
        s_a_q: format_set(&t.s_a_q),
        s_aalpha2_q: format_set(&t.s_aalpha2_q),
        size_s_a_l: t.size_s_a_l,
        h3: t.h3_s_a_l.unwrap_or_default(),
        r: rank_text(rank),
        s_phi_l: t.phi_k.lower,
        s_phi_u: t.phi_k.upper,
        s3_l: t.sel3_k.lower,
        s3_u: t.sel3_k.upper,
        error: String::new(),
    })
}

pub fn table2_row(
    engine: &ClassGroupEngine,
    a: &BigInt,
    b: &BigInt,
    rank: Option<RankSpec>,
) -> Result<Table2Row> {
    let t = analyze_type2(
        engine,
        &Type2Args {
            a: a.clone(),
            b: b.clone(),
            rank,
        },
    )?;
    Ok(Table2Row {
        a: a.to_string(),
        b: b.to_string(),
        s1: format_set(&t.s1),
        s2: format_set(&t.s2),
        s3: format_set(&t.s3),
        h12: t.h3_s12_l.unwrap_or_default(),
        h13: t.h3_s13_l.unwrap_or_default(),
        r: rank_text(rank),
        s_psi_l: t.psi.lower,
        s_psi_u: t.psi.upper,
        s3_l: t.sel3.lower,
        s3_u: t.sel3.upper,
        error: String::new(),
    })
}

/// Evaluated rows plus the first failure, if any.
pub struct TableOutput<R> {
    pub rows: Vec<R>,
    pub first_error: Option<Error>,
}

pub fn run_table1(engine: &ClassGroupEngine, rows: &[RowInput]) -> TableOutput<Table1Row> {
    let results: Vec<Result<Table1Row>> = rows
        .par_iter()
        .map(|r| table1_row(engine, &r.a, r.rank))
        .collect();
    collect(results, rows, |input, err| Table1Row {
        a: input.a.to_string(),
        r: rank_text(input.rank),
        error: err.to_string(),
        ..Default::default()
    })
}

pub fn run_table2(engine: &ClassGroupEngine, rows: &[RowInput]) -> TableOutput<Table2Row> {
    let results: Vec<Result<Table2Row>> = rows
        .par_iter()
        .map(|r| {
            let b =
                r.b.as_ref()
                    .ok_or_else(|| Error::InvalidInput("Type II row without b".into()))?;
            table2_row(engine, &r.a, b, r.rank)
        })
        .collect();
    collect(results, rows, |input, err| Table2Row {
        a: input.a.to_string(),
        b: input
            .b
            .as_ref()
            .map_or_else(String::new, ToString::to_string),
        r: rank_text(input.rank),
        error: err.to_string(),
        ..Default::default()
    })
}

fn collect<R>(
    results: Vec<Result<R>>,
    inputs: &[RowInput],
    failed: impl Fn(&RowInput, &Error) -> R,
) -> TableOutput<R> {
    let mut first_error = None;
    let rows = results
        .into_iter()
        .zip(inputs)
        .map(|(res, input)| match res {
            Ok(row) => row,
            Err(err) => {
                let row = failed(input, &err);
                first_error.get_or_insert(err);
                row
            }
        })
        .collect();
    TableOutput { rows, first_error }
}

/// Header line of each table, written even when there are no rows.
pub const TABLE1_HEADERS: [&str; 12] = [
    "a",
    "S_a",
    "S_a(Q)",
    "S_{aα²}(Q)",
    "|S_a(L)|",
    "h³_{S_a(L)}",
    "r",
    "s^φ_l",
    "s^φ_u",
    "s³_l",
    "s³_u",
    "error",
];
pub const TABLE2_HEADERS: [&str; 13] = [
    "a",
    "b",
    "S₁",
    "S₂",
    "S₃",
    "h³_{S₁,₂(L)}",
    "h³_{S₁,₃(L)}",
    "r",
    "s^Ψ_l",
    "s^Ψ_u",
    "s³_l",
    "s³_u",
    "error",
];

pub fn write_csv<R: Serialize>(
    out: impl Write,
    headers: &[&str],
    rows: &[R],
) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(headers)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}
