//! Command-line surface for the local-field toolkit: ramification
//! invariants, reduced normal forms, isomorphism tests, censuses of totally
//! ramified extensions, and class-field construction from norm-group data.
//!
//! Exit codes: 0 on success (and for a positive identification verdict),
//! 1 for a negative verdict, 2 for usage, parse, or computation errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use eisenstein_core::{
    all_reduced, aut_info, different_val, enumerate_totally_ramified, greedy_filter,
    is_isomorphic, ramification_data, reduce, BaseField, ClassRecord, EisensteinPoly, Error as
    CoreError, NormGroupRecord, PolyRecord, Verdict,
};

/// Working precision used for text input when `--prec` is absent; commands
/// retry with more digits if a computation reports it needs them.
const DEFAULT_PREC: usize = 16;
const MAX_PREC: usize = 256;

#[derive(Parser)]
#[command(
    name = "eisenstein",
    version,
    about = "Normal forms, invariants, and class fields of totally ramified extensions of local fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct BaseOpts {
    /// Residue characteristic (a prime); required for text polynomial input.
    #[arg(long)]
    p: Option<u64>,
    /// Residue degree: the residue field is the field with p^f elements.
    #[arg(long, default_value_t = 1)]
    f: usize,
    /// Working precision in uniformizer digits (automatic when omitted).
    #[arg(long)]
    prec: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the ramification invariants of an Eisenstein polynomial.
    Invariants {
        /// Polynomial: monic integer text like "T^2+2*T+2", a polynomial
        /// record as literal JSON, or a path to a .json record.
        poly: String,
        #[command(flatten)]
        base: BaseOpts,
    },
    /// Compute the reduced normal form of an Eisenstein polynomial.
    Reduce {
        poly: String,
        #[command(flatten)]
        base: BaseOpts,
        /// Print the full reduced multiset as "polynomial: multiplicity".
        #[arg(long)]
        all: bool,
        /// Also write the result as JSON records to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether two Eisenstein polynomials generate isomorphic fields.
    Identify {
        poly: String,
        other: String,
        #[command(flatten)]
        base: BaseOpts,
    },
    /// List every totally ramified extension of a given degree as JSON-lines
    /// class records, with an exact mass-formula total.
    Enumerate {
        degree: usize,
        #[command(flatten)]
        base: BaseOpts,
        /// Write the class records to this path instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a reduced defining polynomial of the class field of a
    /// norm-group datum (literal JSON or a path to a .json file).
    Classfield {
        spec: String,
        /// Working precision override for the construction.
        #[arg(long)]
        prec: Option<usize>,
        /// Also write the polynomial as a JSON record to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<u8> {
    match Cli::parse().cmd {
        Cmd::Invariants { poly, base } => cmd_invariants(&poly, &base),
        Cmd::Reduce { poly, base, all, out } => cmd_reduce(&poly, &base, all, out.as_deref()),
        Cmd::Identify { poly, other, base } => cmd_identify(&poly, &other, &base),
        Cmd::Enumerate { degree, base, out } => cmd_enumerate(degree, &base, out.as_deref()),
        Cmd::Classfield { spec, prec, out } => cmd_classfield(&spec, prec, out.as_deref()),
    }
}

/// Precisions to attempt, in order.  An explicit `--prec` is tried alone;
/// otherwise the command escalates when the core reports that more digits
/// are needed.
fn precision_schedule(explicit: Option<usize>) -> Vec<usize> {
    match explicit {
        Some(p) => vec![p],
        None => vec![DEFAULT_PREC, 2 * DEFAULT_PREC, 4 * DEFAULT_PREC, MAX_PREC],
    }
}

fn needs_more_digits(e: &CoreError) -> bool {
    matches!(e, CoreError::PrecisionInsufficient { .. })
}

// ---------------------------------------------------------------------------
// Polynomial input and output.

/// Load a polynomial argument: literal JSON record, path to a JSON record,
/// or monic integer-coefficient text (which needs `--p`).
fn load_poly(arg: &str, opts: &BaseOpts, prec: usize) -> Result<EisensteinPoly> {
    let trimmed = arg.trim();
    let json = if trimmed.starts_with('{') {
        Some(trimmed.to_string())
    } else if trimmed.ends_with(".json") {
        Some(fs::read_to_string(trimmed).with_context(|| format!("reading {trimmed}"))?)
    } else {
        None
    };
    if let Some(text) = json {
        let record: PolyRecord =
            serde_json::from_str(&text).context("invalid polynomial record")?;
        let f = record.realize()?;
        if let Some(p) = opts.p {
            if f.base.p() != p {
                bail!("--p {p} conflicts with the record's residue characteristic {}", f.base.p());
            }
        }
        return Ok(f);
    }
    let p = opts
        .p
        .ok_or_else(|| anyhow!("--p is required for text polynomial input"))?;
    let base = BaseField::char_zero(p, opts.f, prec)?;
    let coeffs = parse_poly_text(trimmed)?;
    Ok(EisensteinPoly::from_integer_coeffs(&base, &coeffs)?)
}

/// Parse monic polynomial text like "T^2+2*T+2" or "T^4-2" into the list of
/// non-leading integer coefficients, constant term first.
fn parse_poly_text(s: &str) -> Result<Vec<i128>> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        bail!("empty polynomial");
    }
    let mut terms: Vec<(i128, usize)> = vec![];
    let mut i = 0;
    while i < chars.len() {
        let mut sign = 1i128;
        if chars[i] == '+' || chars[i] == '-' {
            if chars[i] == '-' {
                sign = -1;
            }
            i += 1;
        } else if !terms.is_empty() {
            bail!("expected '+' or '-' at position {i}");
        }
        let (coeff, var_seen, power) = parse_term(&chars, &mut i)?;
        terms.push((sign * coeff, if var_seen { power } else { 0 }));
    }
    let degree = terms.iter().map(|&(_, k)| k).max().unwrap_or(0);
    if degree == 0 {
        bail!("the polynomial must have degree at least 1");
    }
    if degree > 64 {
        bail!("degree {degree} is out of range");
    }
    let mut dense = vec![0i128; degree + 1];
    for (c, k) in terms {
        dense[k] += c;
    }
    if dense[degree] != 1 {
        bail!("the polynomial must be monic (leading coefficient {})", dense[degree]);
    }
    dense.pop();
    Ok(dense)
}

/// One term after the sign: `INT`, `INT*VAR^K`, `INT VAR^K`, or `VAR^K`.
fn parse_term(chars: &[char], i: &mut usize) -> Result<(i128, bool, usize)> {
    let start = *i;
    let mut coeff: Option<i128> = None;
    if chars.get(*i).is_some_and(|c| c.is_ascii_digit()) {
        coeff = Some(parse_int(chars, i)?);
        if chars.get(*i) == Some(&'*') {
            *i += 1;
            if !chars.get(*i).is_some_and(|&c| is_var(c)) {
                bail!("expected a variable after '*' at position {i}");
            }
        }
    }
    let mut var_seen = false;
    let mut power = 0usize;
    if chars.get(*i).is_some_and(|&c| is_var(c)) {
        *i += 1;
        var_seen = true;
        power = 1;
        if chars.get(*i) == Some(&'^') {
            *i += 1;
            let e = parse_int(chars, i)?;
            if !(1..=64).contains(&e) {
                bail!("exponent {e} is out of range at position {i}");
            }
            power = e as usize;
        }
    }
    if coeff.is_none() && !var_seen {
        bail!(
            "expected a coefficient or a variable at position {start}{}",
            chars
                .get(start)
                .map(|c| format!(" (found '{c}')"))
                .unwrap_or_default()
        );
    }
    Ok((coeff.unwrap_or(1), var_seen, power))
}

fn is_var(c: char) -> bool {
    matches!(c, 'T' | 't' | 'X' | 'x')
}

fn parse_int(chars: &[char], i: &mut usize) -> Result<i128> {
    let start = *i;
    while chars.get(*i).is_some_and(|c| c.is_ascii_digit()) {
        *i += 1;
    }
    chars[start..*i]
        .iter()
        .collect::<String>()
        .parse()
        .map_err(|_| anyhow!("invalid integer at position {start}"))
}

/// Decode a prime-residue-field element as the balanced integer with the
/// same digits: the representative of smallest absolute value.
fn decode_balanced(base: &BaseField, x: &eisenstein_core::IntegerElement) -> Option<i128> {
    let prec = x.digits.len();
    let mut acc: i128 = 0;
    let mut pw: i128 = 1;
    for j in 0..prec {
        let d = base.digit(x, j).ok()?.coords[0] as i128;
        acc = acc.checked_add(d.checked_mul(pw)?)?;
        pw = pw.checked_mul(base.p() as i128)?;
    }
    if acc > pw / 2 {
        acc -= pw;
    }
    Some(acc)
}

/// Render a polynomial over a prime residue field in the same syntax the
/// parser accepts ("T^2+4*T+2"); `None` when the residue field is not prime
/// or a coefficient does not fit.
fn poly_text(f: &EisensteinPoly) -> Option<String> {
    if f.base.f() != 1 || !f.base.is_char_zero() {
        return None;
    }
    let n = f.n();
    let mut out = term_text(1, n, true)?;
    for i in (0..n).rev() {
        let c = decode_balanced(&f.base, &f.coeffs[i])?;
        if c == 0 {
            continue;
        }
        out.push(if c < 0 { '-' } else { '+' });
        out.push_str(&term_text(c.abs(), i, false)?);
    }
    Some(out)
}

fn term_text(c: i128, power: usize, leading: bool) -> Option<String> {
    Some(match (c, power) {
        (_, 0) => format!("{c}"),
        (1, 1) => "T".into(),
        (1, _) => format!("T^{power}"),
        (_, 1) => format!("{c}*T"),
        (_, _) => {
            let _ = leading;
            format!("{c}*T^{power}")
        }
    })
}

/// Print a polynomial: friendly text when the residue field is prime, the
/// JSON record otherwise.
fn print_poly(f: &EisensteinPoly) -> Result<()> {
    match poly_text(f) {
        Some(text) => println!("{text}"),
        None => println!("{}", serde_json::to_string(&PolyRecord::describe(f))?),
    }
    Ok(())
}

fn write_out(path: &std::path::Path, lines: &[String]) -> Result<()> {
    let mut file = fs::File::create(path).with_context(|| format!("creating {path:?}"))?;
    for line in lines {
        writeln!(file, "{line}")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Commands.

fn cmd_invariants(poly_arg: &str, opts: &BaseOpts) -> Result<u8> {
    let schedule = precision_schedule(opts.prec);
    let mut last_err: Option<CoreError> = None;
    for &prec in &schedule {
        let f = load_poly(poly_arg, opts, prec)?;
        match invariants_report(&f) {
            Ok(report) => {
                print!("{report}");
                return Ok(0);
            }
            Err(e) if needs_more_digits(&e) => last_err = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last_err.expect("schedule is nonempty").into())
}

fn invariants_report(f: &EisensteinPoly) -> std::result::Result<String, CoreError> {
    use std::fmt::Write as _;
    let data = ramification_data(f)?;
    let info = aut_info(f)?;
    let d = different_val(f)?;
    let mut out = String::new();
    let join = |items: &[String]| items.join(", ");
    writeln!(out, "degree: {}", f.n()).unwrap();
    writeln!(
        out,
        "polygon: {}",
        join(&data.polygon.vertices.iter().map(|(x, y)| format!("({x}, {y})")).collect::<Vec<_>>())
    )
    .unwrap();
    writeln!(
        out,
        "breaks: {}",
        join(&data.breaks.iter().map(|t| t.to_string()).collect::<Vec<_>>())
    )
    .unwrap();
    writeln!(
        out,
        "phi breakpoints: {} with final slope {}",
        join(&data.phi.pts.iter().map(|(x, y)| format!("({x}, {y})")).collect::<Vec<_>>()),
        data.phi.final_slope
    )
    .unwrap();
    let rats = |v: &[eisenstein_core::Rat]| join(&v.iter().map(|r| r.to_string()).collect::<Vec<_>>());
    writeln!(out, "tau: {}", rats(&data.tau)).unwrap();
    writeln!(out, "xi: {}", rats(&data.xi)).unwrap();
    writeln!(out, "sigma: {}", rats(&data.sigma)).unwrap();
    writeln!(out, "different exponent: {d}").unwrap();
    writeln!(out, "branch count: {}", info.b).unwrap();
    writeln!(out, "automorphisms: {}", info.aut).unwrap();
    Ok(out)
}

fn cmd_reduce(
    poly_arg: &str,
    opts: &BaseOpts,
    all: bool,
    out: Option<&std::path::Path>,
) -> Result<u8> {
    let schedule = precision_schedule(opts.prec);
    let mut last_err: Option<CoreError> = None;
    for &prec in &schedule {
        let f = load_poly(poly_arg, opts, prec)?;
        let result = if all {
            all_reduced(&f).map(|ms| ms.entries)
        } else {
            reduce(&f).map(|g| vec![(g, 1)])
        };
        match result {
            Ok(entries) => {
                let mut lines = vec![];
                for (g, mult) in &entries {
                    match (all, poly_text(g)) {
                        (true, Some(text)) => println!("{text}: {mult}"),
                        (false, Some(text)) => println!("{text}"),
                        (_, None) => print_poly(g)?,
                    }
                    let record = serde_json::to_string(&PolyRecord::describe(g))?;
                    lines.push(if all {
                        serde_json::to_string(
                            &serde_json::json!({ "multiplicity": mult, "poly": serde_json::from_str::<serde_json::Value>(&record)? }),
                        )?
                    } else {
                        record
                    });
                }
                if let Some(path) = out {
                    write_out(path, &lines)?;
                }
                return Ok(0);
            }
            Err(e) if needs_more_digits(&e) => last_err = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last_err.expect("schedule is nonempty").into())
}

fn cmd_identify(poly_arg: &str, other_arg: &str, opts: &BaseOpts) -> Result<u8> {
    let schedule = precision_schedule(opts.prec);
    let mut last_err: Option<CoreError> = None;
    for &prec in &schedule {
        let f = load_poly(poly_arg, opts, prec)?;
        let g = load_poly(other_arg, opts, prec)?;
        match identify_verdict(&f, &g) {
            Ok((verdict, detail)) => {
                return match verdict {
                    Verdict::Isomorphic => {
                        println!("isomorphic ({detail})");
                        Ok(0)
                    }
                    _ => {
                        println!("non-isomorphic ({detail})");
                        Ok(1)
                    }
                };
            }
            Err(e) if needs_more_digits(&e) => last_err = Some(e),
            Err(e) => return Err(e.into()),
        }
    }
    Err(last_err.expect("schedule is nonempty").into())
}

/// Decide isomorphism and name the firing criterion: the greedy filter's
/// rule-out reason when it is conclusive, otherwise the exact comparison of
/// reduced multisets.
fn identify_verdict(
    f: &EisensteinPoly,
    g: &EisensteinPoly,
) -> std::result::Result<(Verdict, String), CoreError> {
    if f == g {
        return Ok((Verdict::Isomorphic, "identical polynomials".into()));
    }
    if let Verdict::RuledOut(reason) = greedy_filter(f, g)? {
        return Ok((Verdict::NonIsomorphic, reason.to_string()));
    }
    Ok(match is_isomorphic(f, g)? {
        Verdict::Isomorphic => (Verdict::Isomorphic, "equal reduced multisets".into()),
        _ => (Verdict::NonIsomorphic, "disjoint reduced multisets".into()),
    })
}

fn cmd_enumerate(degree: usize, opts: &BaseOpts, out: Option<&std::path::Path>) -> Result<u8> {
    let p = opts.p.ok_or_else(|| anyhow!("--p is required"))?;
    // Enumeration knows the precision it needs; start small and escalate to
    // exactly the reported requirement.
    let mut prec = opts.prec.unwrap_or(8);
    let census = loop {
        let base = BaseField::char_zero(p, opts.f, prec)?;
        match enumerate_totally_ramified(&base, degree) {
            Ok(census) => break census,
            Err(CoreError::PrecisionInsufficient { needed })
                if opts.prec.is_none() && needed > prec && needed <= MAX_PREC =>
            {
                prec = needed;
            }
            Err(e) => return Err(e.into()),
        }
    };
    let mut lines = vec![];
    for class in &census.classes {
        lines.push(serde_json::to_string(&ClassRecord::describe(class))?);
    }
    match out {
        Some(path) => write_out(path, &lines)?,
        None => lines.iter().for_each(|l| println!("{l}")),
    }
    println!("classes: {}", census.classes.len());
    println!("mass: {}", census.mass);
    if !census.mass_checks() {
        bail!("mass total {} does not match the degree {degree}", census.mass);
    }
    Ok(0)
}

fn cmd_classfield(spec_arg: &str, prec: Option<usize>, out: Option<&std::path::Path>) -> Result<u8> {
    let trimmed = spec_arg.trim();
    let text = if trimmed.starts_with('{') {
        trimmed.to_string()
    } else {
        fs::read_to_string(trimmed).with_context(|| format!("reading {trimmed}"))?
    };
    let mut record: NormGroupRecord =
        serde_json::from_str(&text).context("invalid norm-group record")?;
    if let Some(prec) = prec {
        record.base.prec = record.base.prec.max(prec);
    }
    let mut attempts = 0;
    let poly = loop {
        let spec = record.realize()?;
        match eisenstein_core::construct(&spec) {
            Ok(poly) => break poly,
            Err(CoreError::PrecisionInsufficient { needed })
                if prec.is_none() && attempts < 4 && needed <= MAX_PREC =>
            {
                record.base.prec = record.base.prec.max(needed);
                attempts += 1;
            }
            Err(e) => return Err(e.into()),
        }
    };
    print_poly(&poly)?;
    if let Some(path) = out {
        write_out(path, &[serde_json::to_string(&PolyRecord::describe(&poly))?])?;
    }
    Ok(0)
}
