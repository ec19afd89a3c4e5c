//! Comma-separated input and result files.
//!
//! * ownership: `owned_id,owner_id,share`
//! * incomes:   `taxpayer_id,kind,income` with kind `corp` or `individual`
//! * results:   `taxpayer_id,kind,initial_income,final_income`
//!
//! Shares and incomes are written with the shortest decimal representation
//! that reads back to the same `f64`; final incomes are rounded to cents.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{IncomeVector, NetworkBuilder, OwnershipNetwork, TaxpayerKind};

pub const OWNERSHIP_HEADER: [&str; 3] = ["owned_id", "owner_id", "share"];
pub const INCOME_HEADER: [&str; 3] = ["taxpayer_id", "kind", "income"];
pub const RESULT_HEADER: [&str; 4] = ["taxpayer_id", "kind", "initial_income", "final_income"];

#[derive(Debug, Clone, PartialEq)]
pub struct OwnershipRecord {
    pub owned_id: String,
    pub owner_id: String,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncomeRecord {
    pub taxpayer_id: String,
    pub kind: TaxpayerKind,
    pub income: f64,
}

#[derive(Debug, Clone)]
pub struct ParsedInputs {
    pub network: OwnershipNetwork,
    pub incomes: IncomeVector,
    pub warnings: Vec<String>,
}

fn format_err(path: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_owned(),
        line,
        message: message.into(),
    }
}

fn csv_reader<R: Read>(src: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(src)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, path: &str, expected: &[&str]) -> Result<()> {
    let header = rdr
        .headers()
        .map_err(|e| format_err(path, 1, e.to_string()))?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(format_err(
            path,
            1,
            format!("expected header `{}`, found `{}`", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

fn parse_number(field: &str, path: &str, line: u64, what: &str) -> Result<f64> {
    let x: f64 = field
        .parse()
        .map_err(|_| format_err(path, line, format!("{what} `{field}` is not a decimal number")))?;
    if !x.is_finite() {
        return Err(format_err(path, line, format!("{what} `{field}` is not finite")));
    }
    Ok(x)
}

pub fn read_ownership<R: Read>(src: R, path: &str) -> Result<Vec<OwnershipRecord>> {
    let mut rdr = csv_reader(src);
    check_header(&mut rdr, path, &OWNERSHIP_HEADER)?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            format_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(format_err(path, line, format!("expected 3 fields, found {}", rec.len())));
        }
        let (owned, owner) = (rec[0].to_owned(), rec[1].to_owned());
        if owned.is_empty() || owner.is_empty() {
            return Err(format_err(path, line, "empty taxpayer id"));
        }
        let share = parse_number(&rec[2], path, line, "share")?;
        if !(0.0..=1.0).contains(&share) {
            return Err(format_err(path, line, format!("share {share} outside [0, 1]")));
        }
        if !seen.insert((owned.clone(), owner.clone())) {
            return Err(format_err(path, line, format!("duplicate record {owned} <- {owner}")));
        }
        out.push(OwnershipRecord {
            owned_id: owned,
            owner_id: owner,
            share,
        });
    }
    Ok(out)
}

pub fn read_incomes<R: Read>(src: R, path: &str) -> Result<Vec<IncomeRecord>> {
    let mut rdr = csv_reader(src);
    check_header(&mut rdr, path, &INCOME_HEADER)?;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            format_err(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(format_err(path, line, format!("expected 3 fields, found {}", rec.len())));
        }
        let id = rec[0].to_owned();
        if id.is_empty() {
            return Err(format_err(path, line, "empty taxpayer id"));
        }
        let kind = match &rec[1] {
            "corp" => TaxpayerKind::Corporation,
            "individual" => TaxpayerKind::Individual,
            other => return Err(format_err(path, line, format!("unknown kind `{other}`"))),
        };
        let income = parse_number(&rec[2], path, line, "income")?;
        if !seen.insert(id.clone()) {
            return Err(format_err(path, line, format!("duplicate taxpayer `{id}`")));
        }
        out.push(IncomeRecord {
            taxpayer_id: id,
            kind,
            income,
        });
    }
    Ok(out)
}

/// Assembles a network and initial incomes from parsed records.
///
/// Kinds come from the income records when present. Otherwise an id that
/// appears as `owned_id` is a corporation and one that only appears as
/// `owner_id` is an individual; both cases get income 0 and a warning.
pub fn assemble(ownership: &[OwnershipRecord], incomes: &[IncomeRecord]) -> Result<ParsedInputs> {
    let mut kinds: BTreeMap<&str, TaxpayerKind> = BTreeMap::new();
    let mut values: BTreeMap<&str, f64> = BTreeMap::new();
    for r in incomes {
        kinds.insert(&r.taxpayer_id, r.kind);
        values.insert(&r.taxpayer_id, r.income);
    }
    let mut warnings = Vec::new();
    let owned: BTreeSet<&str> = ownership.iter().map(|r| r.owned_id.as_str()).collect();
    let mentioned: BTreeSet<&str> = ownership
        .iter()
        .flat_map(|r| [r.owned_id.as_str(), r.owner_id.as_str()])
        .collect();
    for id in mentioned {
        if kinds.contains_key(id) {
            continue;
        }
        if owned.contains(id) {
            kinds.insert(id, TaxpayerKind::Corporation);
            warnings.push(format!("corporation {id} has no income record; income 0 assumed"));
        } else {
            kinds.insert(id, TaxpayerKind::Individual);
            warnings.push(format!("owner {id} has no income record; treated as an individual with income 0"));
        }
    }

    let mut b = NetworkBuilder::new();
    for (&id, &kind) in &kinds {
        b.add_taxpayer(id, kind);
    }
    for r in ownership {
        b.add_share(r.owned_id.as_str(), r.owner_id.as_str(), r.share);
    }
    let network = b.build()?;
    let incomes = IncomeVector::from_pairs(&network, values)?;
    Ok(ParsedInputs {
        network,
        incomes,
        warnings,
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

pub fn parse_inputs(ownership_path: &Path, incomes_path: &Path) -> Result<ParsedInputs> {
    let own = read_ownership(open(ownership_path)?, &ownership_path.display().to_string())?;
    let inc = read_incomes(open(incomes_path)?, &incomes_path.display().to_string())?;
    assemble(&own, &inc)
}

/// Network from an ownership file alone; kinds are inferred.
pub fn parse_ownership(ownership_path: &Path) -> Result<ParsedInputs> {
    let own = read_ownership(open(ownership_path)?, &ownership_path.display().to_string())?;
    let mut parsed = assemble(&own, &[])?;
    parsed.warnings.clear();
    Ok(parsed)
}

/// Formats a currency amount with two decimals, never as `-0.00`.
pub fn format_cents(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".to_owned()
    } else {
        s
    }
}

pub fn write_ownership<W: Write>(net: &OwnershipNetwork, dst: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(dst);
    w.write_record(OWNERSHIP_HEADER).map_err(csv_io)?;
    for (i, j, p) in net.edges() {
        w.write_record([net.id(i).as_str(), net.id(j).as_str(), &p.to_string()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_incomes<W: Write>(net: &OwnershipNetwork, e: &IncomeVector, dst: W) -> Result<()> {
    net.check_dimension(e)?;
    let mut w = csv::Writer::from_writer(dst);
    w.write_record(INCOME_HEADER).map_err(csv_io)?;
    for i in 0..net.len() {
        w.write_record([net.id(i).as_str(), net.kind(i).token(), &e[i].to_string()])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results<W: Write>(
    net: &OwnershipNetwork,
    initial: &IncomeVector,
    finals: &IncomeVector,
    dst: W,
) -> Result<()> {
    net.check_dimension(initial)?;
    net.check_dimension(finals)?;
    let mut w = csv::Writer::from_writer(dst);
    w.write_record(RESULT_HEADER).map_err(csv_io)?;
    for i in 0..net.len() {
        w.write_record([
            net.id(i).as_str(),
            net.kind(i).token(),
            &format_cents(initial[i]),
            &format_cents(finals[i]),
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    Ok(BufWriter::new(f))
}
