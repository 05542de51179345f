//! Line-oriented experiment files.
//!
//! ```text
//! # two-photon parity check
//! N 2
//! TERM H H 0.6 0
//! TERM V V 0.8 0
//! ANCILLA GHZ
//! ETA 1.0
//! SIGNCORRECT ON
//! ```
//!
//! One directive per line, `#` starts a comment, keywords are
//! case-insensitive. `ENSEMBLE <weight>` opens a new mixture component; the
//! `TERM` lines after it belong to that component. Besides `ANCILLA GHZ` and
//! `ANCILLA CONTAM <re> <im> PATTERN <pols>`, one or more
//! `ANCILLA TERM <pols> <re> <im>` lines give an explicit ancilla.

use std::fmt;

use thiserror::Error;

use super::{AncillaSpec, ExperimentSpec, InputComponent, Term};
use crate::fock::{Amplitude, FidelityConvention, Polarization};

const NORM_WARN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at line {line}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unknown keyword '{0}'")]
    UnknownKeyword(String),
    #[error("invalid polarization '{0}'")]
    InvalidPolarization(String),
    #[error("pattern length mismatch: {found} polarizations, expected {expected}")]
    PatternLength { expected: usize, found: usize },
    #[error("non-numeric amplitude '{0}'")]
    NonNumericAmplitude(String),
    #[error("invalid photon count '{0}'")]
    InvalidPhotonCount(String),
    #[error("ETA {0} out of range [0, 1]")]
    EtaOutOfRange(String),
    #[error("duplicate N directive")]
    DuplicateN,
    #[error("duplicate {0} directive")]
    Duplicate(&'static str),
    #[error("{0} needs N to be declared first")]
    BeforeN(&'static str),
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("unexpected token '{0}'")]
    UnexpectedToken(String),
    #[error("invalid ensemble weight '{0}'")]
    InvalidWeight(String),
    #[error("ensemble component has no TERM lines")]
    EmptyComponent,
    #[error("amplitudes sum to the null state")]
    NullAmplitudes,
    #[error("duplicate TERM configuration")]
    DuplicateTerm,
    #[error("invalid contaminant: {0}")]
    Contaminant(&'static str),
    #[error("conflicting ANCILLA directives")]
    ConflictingAncilla,
    #[error("expected ON or OFF, got '{0}'")]
    InvalidSwitch(String),
    #[error("missing N directive")]
    MissingN,
    #[error("no TERM directives")]
    NoTerms,
}

/// A non-fatal observation made while loading a file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub spec: ExperimentSpec,
    pub warnings: Vec<ParseWarning>,
}

struct RawComponent {
    line: usize,
    weight: f64,
    terms: Vec<Term>,
}

enum RawAncilla {
    Ghz,
    Contaminated(Amplitude, Vec<Polarization>),
    Explicit { line: usize, terms: Vec<Term> },
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn parse_number(tok: &str, line: usize) -> Result<f64, ParseError> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| err(line, ParseErrorKind::NonNumericAmplitude(tok.to_string())))
}

fn parse_amplitude(re: &str, im: &str, line: usize) -> Result<Amplitude, ParseError> {
    Ok(Amplitude::new(
        parse_number(re, line)?,
        parse_number(im, line)?,
    ))
}

fn parse_pols(toks: &[&str], n: usize, line: usize) -> Result<Vec<Polarization>, ParseError> {
    let pols = toks
        .iter()
        .map(|t| {
            t.parse::<Polarization>()
                .map_err(|e| err(line, ParseErrorKind::InvalidPolarization(e.0)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pols.len() != n {
        return Err(err(
            line,
            ParseErrorKind::PatternLength {
                expected: n,
                found: pols.len(),
            },
        ));
    }
    Ok(pols)
}

/// `<pols...> <re> <im>`
fn parse_term(args: &[&str], n: usize, line: usize) -> Result<Term, ParseError> {
    if args.len() < 2 {
        return Err(err(line, ParseErrorKind::Missing("amplitude")));
    }
    let (pols, nums) = args.split_at(args.len() - 2);
    let amp = parse_amplitude(nums[0], nums[1], line)?;
    let pols = parse_pols(pols, n, line)?;
    Ok((pols, amp))
}

fn push_term(terms: &mut Vec<Term>, term: Term, line: usize) -> Result<(), ParseError> {
    if terms.iter().any(|(p, _)| *p == term.0) {
        return Err(err(line, ParseErrorKind::DuplicateTerm));
    }
    terms.push(term);
    Ok(())
}

/// Rescales amplitudes to unit norm, warning when the raw norm was off.
fn normalize_terms(
    terms: &mut [Term],
    line: usize,
    what: &str,
    warnings: &mut Vec<ParseWarning>,
) -> Result<(), ParseError> {
    let norm = terms.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(err(line, ParseErrorKind::NullAmplitudes));
    }
    if (norm - 1.0).abs() > NORM_WARN_TOL {
        warnings.push(ParseWarning {
            line,
            message: format!("{what} amplitudes normalized (raw norm {norm})"),
        });
    }
    for (_, a) in terms.iter_mut() {
        *a /= norm;
    }
    Ok(())
}

fn expect_end(rest: &[&str], line: usize) -> Result<(), ParseError> {
    match rest.first() {
        Some(t) => Err(err(line, ParseErrorKind::UnexpectedToken(t.to_string()))),
        None => Ok(()),
    }
}

/// Parses an experiment file. Amplitudes and ensemble weights come back
/// normalized; any rescaling is reported as a warning.
pub fn parse_experiment(text: &str) -> Result<Parsed, ParseError> {
    let mut n: Option<usize> = None;
    let mut components: Vec<RawComponent> = Vec::new();
    let mut ancilla: Option<RawAncilla> = None;
    let mut eta: Option<f64> = None;
    let mut sign_correct: Option<bool> = None;
    let mut warnings = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some((kw, args)) = toks.split_first() else {
            continue;
        };
        let need_n = |what: &'static str| n.ok_or_else(|| err(line, ParseErrorKind::BeforeN(what)));

        match kw.to_ascii_uppercase().as_str() {
            "N" => {
                if n.is_some() {
                    return Err(err(line, ParseErrorKind::DuplicateN));
                }
                let tok = args
                    .first()
                    .ok_or_else(|| err(line, ParseErrorKind::Missing("photon count")))?;
                let value = tok
                    .parse::<usize>()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| {
                        err(line, ParseErrorKind::InvalidPhotonCount(tok.to_string()))
                    })?;
                expect_end(&args[1..], line)?;
                n = Some(value);
            }
            "TERM" => {
                let n = need_n("TERM")?;
                let term = parse_term(args, n, line)?;
                if components.is_empty() {
                    components.push(RawComponent {
                        line,
                        weight: 1.0,
                        terms: Vec::new(),
                    });
                }
                let comp = components.last_mut().expect("component exists");
                push_term(&mut comp.terms, term, line)?;
            }
            "ENSEMBLE" => {
                let tok = args
                    .first()
                    .ok_or_else(|| err(line, ParseErrorKind::Missing("ensemble weight")))?;
                let weight = tok
                    .parse::<f64>()
                    .ok()
                    .filter(|w| w.is_finite() && *w > 0.0)
                    .ok_or_else(|| err(line, ParseErrorKind::InvalidWeight(tok.to_string())))?;
                expect_end(&args[1..], line)?;
                if let Some(prev) = components.last() {
                    if prev.terms.is_empty() {
                        return Err(err(prev.line, ParseErrorKind::EmptyComponent));
                    }
                }
                components.push(RawComponent {
                    line,
                    weight,
                    terms: Vec::new(),
                });
            }
            "ANCILLA" => {
                let form = args
                    .first()
                    .ok_or_else(|| err(line, ParseErrorKind::Missing("ancilla form")))?;
                match form.to_ascii_uppercase().as_str() {
                    "GHZ" => {
                        expect_end(&args[1..], line)?;
                        if ancilla.is_some() {
                            return Err(err(line, ParseErrorKind::ConflictingAncilla));
                        }
                        ancilla = Some(RawAncilla::Ghz);
                    }
                    "CONTAM" => {
                        let n = need_n("ANCILLA CONTAM")?;
                        if ancilla.is_some() {
                            return Err(err(line, ParseErrorKind::ConflictingAncilla));
                        }
                        if args.len() < 3 {
                            return Err(err(
                                line,
                                ParseErrorKind::Missing("contaminant amplitude"),
                            ));
                        }
                        let eps = parse_amplitude(args[1], args[2], line)?;
                        match args.get(3) {
                            Some(t) if t.eq_ignore_ascii_case("PATTERN") => {}
                            Some(t) => {
                                return Err(err(
                                    line,
                                    ParseErrorKind::UnexpectedToken(t.to_string()),
                                ))
                            }
                            None => return Err(err(line, ParseErrorKind::Missing("PATTERN"))),
                        }
                        let pattern = parse_pols(&args[4..], n, line)?;
                        if eps.norm() >= 1.0 {
                            return Err(err(
                                line,
                                ParseErrorKind::Contaminant("|epsilon| must be below 1"),
                            ));
                        }
                        if pattern.windows(2).all(|w| w[0] == w[1]) {
                            return Err(err(
                                line,
                                ParseErrorKind::Contaminant("pattern must mix H and V"),
                            ));
                        }
                        ancilla = Some(RawAncilla::Contaminated(eps, pattern));
                    }
                    "TERM" => {
                        let n = need_n("ANCILLA TERM")?;
                        let term = parse_term(&args[1..], n, line)?;
                        match &mut ancilla {
                            None => {
                                ancilla = Some(RawAncilla::Explicit {
                                    line,
                                    terms: vec![term],
                                })
                            }
                            Some(RawAncilla::Explicit { terms, .. }) => {
                                push_term(terms, term, line)?
                            }
                            Some(_) => return Err(err(line, ParseErrorKind::ConflictingAncilla)),
                        }
                    }
                    other => {
                        return Err(err(
                            line,
                            ParseErrorKind::UnexpectedToken(other.to_string()),
                        ))
                    }
                }
            }
            "ETA" => {
                if eta.is_some() {
                    return Err(err(line, ParseErrorKind::Duplicate("ETA")));
                }
                let tok = args
                    .first()
                    .ok_or_else(|| err(line, ParseErrorKind::Missing("efficiency")))?;
                let value = tok
                    .parse::<f64>()
                    .ok()
                    .filter(|v| (0.0..=1.0).contains(v))
                    .ok_or_else(|| err(line, ParseErrorKind::EtaOutOfRange(tok.to_string())))?;
                expect_end(&args[1..], line)?;
                eta = Some(value);
            }
            "SIGNCORRECT" => {
                if sign_correct.is_some() {
                    return Err(err(line, ParseErrorKind::Duplicate("SIGNCORRECT")));
                }
                let tok = args
                    .first()
                    .ok_or_else(|| err(line, ParseErrorKind::Missing("ON or OFF")))?;
                let value = match tok.to_ascii_uppercase().as_str() {
                    "ON" => true,
                    "OFF" => false,
                    _ => return Err(err(line, ParseErrorKind::InvalidSwitch(tok.to_string()))),
                };
                expect_end(&args[1..], line)?;
                sign_correct = Some(value);
            }
            _ => return Err(err(line, ParseErrorKind::UnknownKeyword(kw.to_string()))),
        }
    }

    let eof = last_line.max(1);
    let n = n.ok_or_else(|| err(eof, ParseErrorKind::MissingN))?;
    if components.is_empty() {
        return Err(err(eof, ParseErrorKind::NoTerms));
    }
    if let Some(c) = components.iter().find(|c| c.terms.is_empty()) {
        return Err(err(c.line, ParseErrorKind::EmptyComponent));
    }

    let mut input = Vec::with_capacity(components.len());
    for mut c in components {
        normalize_terms(&mut c.terms, c.line, "input", &mut warnings)?;
        input.push(InputComponent {
            weight: c.weight,
            terms: c.terms,
        });
    }
    let total: f64 = input.iter().map(|c| c.weight).sum();
    if (total - 1.0).abs() > NORM_WARN_TOL {
        warnings.push(ParseWarning {
            line: eof,
            message: format!("ensemble weights rescaled (raw sum {total})"),
        });
    }
    for c in &mut input {
        c.weight /= total;
    }

    let ancilla = match ancilla.unwrap_or(RawAncilla::Ghz) {
        RawAncilla::Ghz => AncillaSpec::Ghz,
        RawAncilla::Contaminated(epsilon, pattern) => {
            AncillaSpec::Contaminated { epsilon, pattern }
        }
        RawAncilla::Explicit { line, mut terms } => {
            normalize_terms(&mut terms, line, "ancilla", &mut warnings)?;
            AncillaSpec::Explicit(terms)
        }
    };

    Ok(Parsed {
        spec: ExperimentSpec {
            n,
            input,
            ancilla,
            eta: eta.unwrap_or(1.0),
            sign_correct: sign_correct.unwrap_or(true),
            convention: FidelityConvention::Amplitude,
        },
        warnings,
    })
}

fn write_pols(f: &mut fmt::Formatter<'_>, pols: &[Polarization]) -> fmt::Result {
    for p in pols {
        write!(f, " {p}")?;
    }
    Ok(())
}

/// Prints the spec in the file grammar; parsing the output gives back an
/// equivalent spec.
impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "N {}", self.n)?;
        let mixed = self.input.len() > 1;
        for c in &self.input {
            if mixed {
                writeln!(f, "ENSEMBLE {}", c.weight)?;
            }
            for (pols, a) in &c.terms {
                f.write_str("TERM")?;
                write_pols(f, pols)?;
                writeln!(f, " {} {}", a.re, a.im)?;
            }
        }
        match &self.ancilla {
            AncillaSpec::Ghz => writeln!(f, "ANCILLA GHZ")?,
            AncillaSpec::Contaminated { epsilon, pattern } => {
                write!(f, "ANCILLA CONTAM {} {} PATTERN", epsilon.re, epsilon.im)?;
                write_pols(f, pattern)?;
                writeln!(f)?;
            }
            AncillaSpec::Explicit(terms) => {
                for (pols, a) in terms {
                    f.write_str("ANCILLA TERM")?;
                    write_pols(f, pols)?;
                    writeln!(f, " {} {}", a.re, a.im)?;
                }
            }
        }
        writeln!(f, "ETA {}", self.eta)?;
        writeln!(
            f,
            "SIGNCORRECT {}",
            if self.sign_correct { "ON" } else { "OFF" }
        )
    }
}

impl std::str::FromStr for ExperimentSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_experiment(s).map(|p| p.spec)
    }
}
