//! `.qproto` parser.
//!
//! One statement per line, `#` starts a comment. A statement is a keyword,
//! positional labels, then `key=value` arguments:
//!
//! ```text
//! set lambda=0.01
//! cavity c1 fock=2 init=plus
//! atom a1 init=b,P0
//! aux x1 init=g
//! bragg a1 c1 t=endpoint
//! pulse a1 sel=P-2 t=endpoint paper_phi=pi
//! detect x1
//! ```
//!
//! Parsing never stops at the first problem: every line is checked and all
//! diagnostics are returned together.

use std::collections::HashMap;
use std::fmt;

use hypercavity_core::protocol::{
    CavityInit, Declaration, Located, PaperTable, PhaseExpr, ReferenceFamily, Script, Setting, Step, TimeExpr,
};
use hypercavity_core::SubsystemKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    /// Character outside the token alphabet.
    Lex,
    /// Unknown statement keyword or argument name.
    Keyword,
    Undeclared,
    /// Wrong number of positional labels or a missing required argument.
    Arity,
    /// Label of the wrong subsystem kind.
    Type,
    Duplicate,
    /// Malformed or out-of-range value.
    Value,
    /// Statement in an impossible position (after `detect`, or using a
    /// removed subsystem).
    Order,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Lex => "E_LEX",
            Code::Keyword => "E_KEYWORD",
            Code::Undeclared => "E_UNDECLARED",
            Code::Arity => "E_ARITY",
            Code::Type => "E_TYPE",
            Code::Duplicate => "E_DUPLICATE",
            Code::Value => "E_VALUE",
            Code::Order => "E_ORDER",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based.
    pub line: usize,
    /// 1-based, in characters.
    pub col: usize,
    pub code: Code,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.col, self.code, self.message)
    }
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn token_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '=' | ',' | '/' | '+' | '-' | '₋')
}

/// Splits a line (comment already stripped) into tokens.
fn lex<'a>(line: &'a str, lineno: usize, diags: &mut Vec<Diagnostic>) -> Option<Vec<Token<'a>>> {
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut ok = true;
    for (col, (byte, c)) in line.char_indices().enumerate() {
        if c.is_whitespace() {
            if let Some((b, col0)) = start.take() {
                tokens.push(Token { text: &line[b..byte], col: col0 + 1 });
            }
        } else {
            if !token_char(c) {
                diags.push(Diagnostic {
                    line: lineno,
                    col: col + 1,
                    code: Code::Lex,
                    message: format!("unexpected character {c:?}"),
                });
                ok = false;
            }
            if start.is_none() {
                start = Some((byte, col));
            }
        }
    }
    if let Some((b, col0)) = start {
        tokens.push(Token { text: &line[b..], col: col0 + 1 });
    }
    ok.then_some(tokens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DeclKind {
    Cavity,
    Atom,
    Aux,
}

impl DeclKind {
    fn name(self) -> &'static str {
        match self {
            DeclKind::Cavity => "cavity",
            DeclKind::Atom => "atom",
            DeclKind::Aux => "auxiliary atom",
        }
    }
}

struct Parser {
    diags: Vec<Diagnostic>,
    script: Script,
    declared: HashMap<String, (DeclKind, usize)>,
    /// First declaration line of every label, from a pre-pass.
    declared_at: HashMap<String, usize>,
    removed: HashMap<String, usize>,
    detect_line: Option<usize>,
}

/// One statement's tokens after the keyword.
struct Args<'a> {
    line: usize,
    keyword: Token<'a>,
    positional: Vec<Token<'a>>,
    named: Vec<(Token<'a>, &'a str, usize)>,
}

impl<'a> Args<'a> {
    fn end_col(&self) -> usize {
        let last = self.named.last().map(|(k, _, _)| *k).or(self.positional.last().copied()).unwrap_or(self.keyword);
        last.col + last.text.chars().count()
    }
}

impl Parser {
    fn diag(&mut self, line: usize, col: usize, code: Code, message: impl Into<String>) {
        self.diags.push(Diagnostic { line, col, code, message: message.into() });
    }

    fn split<'a>(&mut self, line: usize, tokens: &[Token<'a>]) -> Option<Args<'a>> {
        let keyword = tokens[0];
        let mut positional = Vec::new();
        let mut named: Vec<(Token<'a>, &'a str, usize)> = Vec::new();
        let mut ok = true;
        for t in &tokens[1..] {
            if let Some((k, v)) = t.text.split_once('=') {
                if k.is_empty() || v.is_empty() {
                    self.diag(line, t.col, Code::Lex, format!("malformed argument `{}`", t.text));
                    ok = false;
                    continue;
                }
                if named.iter().any(|(n, _, _)| n.text == k) {
                    self.diag(line, t.col, Code::Duplicate, format!("argument `{k}` given twice"));
                    ok = false;
                    continue;
                }
                let vcol = t.col + k.chars().count() + 1;
                named.push((Token { text: k, col: t.col }, v, vcol));
            } else if !named.is_empty() {
                self.diag(line, t.col, Code::Arity, format!("label `{}` after named arguments", t.text));
                ok = false;
            } else {
                positional.push(*t);
            }
        }
        ok.then_some(Args { line, keyword, positional, named })
    }

    /// Rejects argument names outside `allowed`.
    fn check_names(&mut self, a: &Args<'_>, allowed: &[&str]) -> bool {
        let mut ok = true;
        for (k, _, _) in &a.named {
            if !allowed.contains(&k.text) {
                let expected = if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") };
                self.diag(a.line, k.col, Code::Keyword, format!("unknown argument `{}` for `{}` (expected: {expected})", k.text, a.keyword.text));
                ok = false;
            }
        }
        ok
    }

    fn positional_count(&mut self, a: &Args<'_>, want: usize, what: &str) -> bool {
        if a.positional.len() == want {
            return true;
        }
        let col = a.positional.get(want).map(|t| t.col).unwrap_or_else(|| a.end_col());
        self.diag(a.line, col, Code::Arity, format!("`{}` takes {what}, found {} label(s)", a.keyword.text, a.positional.len()));
        false
    }

    fn named<'a>(a: &Args<'a>, key: &str) -> Option<(&'a str, usize)> {
        a.named.iter().find(|(k, _, _)| k.text == key).map(|(_, v, c)| (*v, *c))
    }

    fn required<'a>(&mut self, a: &Args<'a>, key: &str) -> Option<(&'a str, usize)> {
        let v = Self::named(a, key);
        if v.is_none() {
            let col = a.end_col();
            self.diag(a.line, col, Code::Arity, format!("`{}` requires `{key}=`", a.keyword.text));
        }
        v
    }

    fn label_syntax(&mut self, line: usize, t: Token<'_>) -> bool {
        let mut chars = t.text.chars();
        let good = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !good {
            self.diag(line, t.col, Code::Value, format!("`{}` is not a valid label", t.text));
        }
        good
    }

    /// Resolves a use of a declared label, checking its kind.
    fn use_label(&mut self, line: usize, t: Token<'_>, want: &[DeclKind], role: &str) -> bool {
        let Some(&(kind, _)) = self.declared.get(t.text) else {
            let msg = match self.declared_at.get(t.text) {
                Some(d) => format!("`{}` is used before its declaration on line {d}", t.text),
                None => format!("`{}` is not declared", t.text),
            };
            self.diag(line, t.col, Code::Undeclared, msg);
            return false;
        };
        let kind_ok = want.contains(&kind);
        if !kind_ok {
            self.diag(line, t.col, Code::Type, format!("{role} `{}` is a {}", t.text, kind.name()));
            return false;
        }
        if let Some(&r) = self.removed.get(t.text) {
            self.diag(line, t.col, Code::Order, format!("`{}` was removed on line {r}", t.text));
            return false;
        }
        true
    }

    fn value<T>(&mut self, line: usize, col: usize, r: Result<T, String>) -> Option<T> {
        r.map_err(|m| self.diag(line, col, Code::Value, m)).ok()
    }

    fn statement(&mut self, line: usize, tokens: &[Token<'_>]) {
        let Some(a) = self.split(line, tokens) else { return };
        if let Some(d) = self.detect_line {
            if a.keyword.text != "set" {
                self.diag(line, a.keyword.col, Code::Order, format!("statement after `detect` on line {d}"));
                return;
            }
        }
        match a.keyword.text {
            "set" => self.set(&a),
            "cavity" | "atom" | "aux" => self.declaration(&a),
            "bragg" | "pulse" | "jc" | "dispersive" | "ramsey" | "detect" | "remove" => self.step(&a),
            other => self.diag(
                line,
                a.keyword.col,
                Code::Keyword,
                format!("unknown keyword `{other}` (expected set, cavity, atom, aux, bragg, pulse, jc, dispersive, ramsey, detect or remove)"),
            ),
        }
    }

    fn set(&mut self, a: &Args<'_>) {
        if !self.positional_count(a, 0, "only key=value arguments") {
            return;
        }
        if a.named.is_empty() {
            self.diag(a.line, a.end_col(), Code::Arity, "`set` needs at least one key=value");
            return;
        }
        for (k, v, col) in &a.named {
            let (v, col) = (*v, *col);
            let rate = |f: fn(f64) -> Setting| parse_rate(v).map(f);
            let s = match k.text {
                "mu" => rate(Setting::Mu),
                "delta" => rate(Setting::Delta),
                "omega_r" => rate(Setting::OmegaR),
                "lambda" => rate(Setting::Lambda),
                "omega" => rate(Setting::Omega),
                "reference" => ReferenceFamily::from_name(v)
                    .map(Setting::Reference)
                    .map_err(|_| format!("unknown reference `{v}`")),
                "reference_time" => parse_time(v).map(Setting::ReferenceTime),
                other => {
                    self.diag(a.line, k.col, Code::Keyword, format!("unknown setting `{other}`"));
                    continue;
                }
            };
            if let Some(s) = self.value(a.line, col, s) {
                self.script.settings.push(Located::new(a.line, s));
            }
        }
    }

    fn declaration(&mut self, a: &Args<'_>) {
        let kw = a.keyword.text;
        let allowed: &[&str] = if kw == "cavity" { &["fock", "init"] } else { &["init"] };
        let names_ok = self.check_names(a, allowed);
        if !self.positional_count(a, 1, "exactly one label") || !names_ok {
            return;
        }
        let t = a.positional[0];
        if !self.label_syntax(a.line, t) {
            return;
        }
        if let Some(&(_, prev)) = self.declared.get(t.text) {
            self.diag(a.line, t.col, Code::Duplicate, format!("`{}` already declared on line {prev}", t.text));
            return;
        }
        let label = t.text.to_string();
        let init = Self::named(a, "init");
        let (decl, kind) = match kw {
            "cavity" => {
                let fock = match Self::named(a, "fock") {
                    Some((v, col)) => {
                        let r = v.parse::<usize>().ok().filter(|&n| n >= 2).ok_or_else(|| format!("fock cutoff must be an integer ⩾ 2, got `{v}`"));
                        let Some(n) = self.value(a.line, col, r) else { return };
                        n
                    }
                    None => 2,
                };
                let init = match init {
                    Some(("plus", _)) => CavityInit::Plus,
                    Some((v, col)) => {
                        let r = v.parse::<usize>().ok().filter(|&n| n < fock).ok_or_else(|| {
                            format!("cavity init must be `plus` or a photon number below the cutoff {fock}, got `{v}`")
                        });
                        let Some(n) = self.value(a.line, col, r) else { return };
                        CavityInit::Fock(n)
                    }
                    None => CavityInit::Fock(0),
                };
                (Declaration::Cavity { label: label.clone(), fock, init }, DeclKind::Cavity)
            }
            "atom" => {
                let (internal, momentum) = match init {
                    Some((v, col)) => {
                        let r = v
                            .split_once(',')
                            .and_then(|(i, m)| {
                                let i = SubsystemKind::Internal.parse_basis(i).filter(|&i| i < 2)?;
                                let m = SubsystemKind::Momentum.parse_basis(m).filter(|&m| m < 2)?;
                                Some((i, m))
                            })
                            .ok_or_else(|| format!("atom init must be `<b|a>,<P0|P-2>`, got `{v}`"));
                        let Some(p) = self.value(a.line, col, r) else { return };
                        p
                    }
                    None => (0, 0),
                };
                (Declaration::Atom { label: label.clone(), internal, momentum }, DeclKind::Atom)
            }
            _ => {
                let level = match init {
                    Some((v, col)) => {
                        let r = SubsystemKind::Auxiliary
                            .parse_basis(v)
                            .filter(|&l| l < 2)
                            .ok_or_else(|| format!("aux init must be `g` or `e`, got `{v}`"));
                        let Some(l) = self.value(a.line, col, r) else { return };
                        l
                    }
                    None => 0,
                };
                (Declaration::Aux { label: label.clone(), init: level }, DeclKind::Aux)
            }
        };
        self.declared.insert(label, (kind, a.line));
        self.script.declarations.push(Located::new(a.line, decl));
    }

    fn time(&mut self, a: &Args<'_>) -> Option<TimeExpr> {
        let (v, col) = self.required(a, "t")?;
        let r = parse_time(v);
        self.value(a.line, col, r)
    }

    fn step(&mut self, a: &Args<'_>) {
        let kw = a.keyword.text;
        let line = a.line;
        let allowed: &[&str] = match kw {
            "bragg" | "jc" => &["t"],
            "pulse" => &["sel", "t", "phi", "paper_phi"],
            "dispersive" => &["t", "paper_table"],
            _ => &[],
        };
        let names_ok = self.check_names(a, allowed);
        let arity_ok = match kw {
            "bragg" | "jc" | "dispersive" => self.positional_count(a, 2, "two labels"),
            "pulse" | "ramsey" | "remove" => self.positional_count(a, 1, "one label"),
            _ => {
                if a.positional.is_empty() {
                    self.diag(line, a.end_col(), Code::Arity, "`detect` needs at least one auxiliary atom");
                    false
                } else {
                    true
                }
            }
        };
        if !names_ok || !arity_ok {
            return;
        }
        let p = &a.positional;
        const CAV: &[DeclKind] = &[DeclKind::Cavity];
        let step = match kw {
            "bragg" => {
                let ok = self.use_label(line, p[0], &[DeclKind::Atom], "bragg atom") & self.use_label(line, p[1], CAV, "bragg cavity");
                let t = self.time(a);
                if !ok {
                    return;
                }
                Step::Bragg { atom: p[0].text.into(), cavity: p[1].text.into(), t: match t { Some(t) => t, None => return } }
            }
            "pulse" => {
                let ok = self.use_label(line, p[0], &[DeclKind::Atom], "pulse atom");
                let sel = match Self::named(a, "sel") {
                    Some((v, col)) => {
                        let r = SubsystemKind::Momentum
                            .parse_basis(v)
                            .filter(|&m| m < 2)
                            .ok_or_else(|| format!("sel must be `P0` or `P-2`, got `{v}`"));
                        self.value(line, col, r)
                    }
                    None => Some(1),
                };
                let t = self.time(a);
                let mut phase = |key: &str| match Self::named(a, key) {
                    Some((v, col)) => {
                        let r = parse_phase(v);
                        self.value(line, col, r).map(Some)
                    }
                    None => Some(None),
                };
                let phi = phase("phi");
                let paper_phi = phase("paper_phi");
                let (true, Some(sel), Some(t), Some(phi), Some(paper_phi)) = (ok, sel, t, phi, paper_phi) else { return };
                Step::Pulse { atom: p[0].text.into(), sel, t, phi, paper_phi }
            }
            "jc" | "dispersive" => {
                let ok = self.use_label(line, p[0], &[DeclKind::Aux], &format!("{kw} auxiliary atom"))
                    & self.use_label(line, p[1], CAV, &format!("{kw} cavity"));
                let t = self.time(a);
                let table = match Self::named(a, "paper_table") {
                    Some(("standard", _)) => Some(Some(PaperTable::Standard)),
                    Some(("cluster", _)) => Some(Some(PaperTable::Cluster)),
                    Some((v, col)) => {
                        self.diag(line, col, Code::Value, format!("paper_table must be `standard` or `cluster`, got `{v}`"));
                        None
                    }
                    None => Some(None),
                };
                let (true, Some(t), Some(table)) = (ok, t, table) else { return };
                let (aux, cavity) = (p[0].text.to_string(), p[1].text.to_string());
                if kw == "jc" {
                    Step::Jc { aux, cavity, t }
                } else {
                    Step::Dispersive { aux, cavity, t, table }
                }
            }
            "ramsey" => {
                if !self.use_label(line, p[0], &[DeclKind::Aux], "ramsey target") {
                    return;
                }
                Step::Ramsey { aux: p[0].text.into() }
            }
            "remove" => {
                if !self.use_label(line, p[0], &[DeclKind::Aux, DeclKind::Cavity], "removed subsystem") {
                    return;
                }
                self.removed.insert(p[0].text.into(), line);
                Step::Remove { label: p[0].text.into() }
            }
            _ => {
                let mut ok = true;
                for (i, t) in p.iter().enumerate() {
                    if p[..i].iter().any(|o| o.text == t.text) {
                        self.diag(line, t.col, Code::Duplicate, format!("`{}` detected twice", t.text));
                        ok = false;
                        continue;
                    }
                    ok &= self.use_label(line, *t, &[DeclKind::Aux], "detect target");
                }
                self.detect_line = Some(line);
                if !ok {
                    return;
                }
                Step::Detect { targets: p.iter().map(|t| t.text.to_string()).collect() }
            }
        };
        self.script.steps.push(Located::new(line, step));
    }
}

fn parse_float(v: &str) -> Result<f64, String> {
    let x: f64 = v.parse().map_err(|_| format!("`{v}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{v}` is not finite"))
    }
}

fn parse_rate(v: &str) -> Result<f64, String> {
    let x = parse_float(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("rates must be positive, got `{v}`"))
    }
}

/// `endpoint`, `pi/lambda`, `pi/2lambda`, `pi/omega` or a non-negative number.
pub fn parse_time(v: &str) -> Result<TimeExpr, String> {
    Ok(match v {
        "endpoint" => TimeExpr::Endpoint,
        "pi/lambda" => TimeExpr::PiOverLambda,
        "pi/2lambda" => TimeExpr::PiOver2Lambda,
        "pi/omega" => TimeExpr::PiOverOmega,
        _ => {
            let x = parse_float(v).map_err(|_| {
                format!("`{v}` is not a time (expected endpoint, pi/lambda, pi/2lambda, pi/omega or a number)")
            })?;
            if x < 0.0 {
                return Err(format!("times must be non-negative, got `{v}`"));
            }
            TimeExpr::Value(x)
        }
    })
}

/// `pi`, `-pi/2`, `3pi/4`, … or a number of radians.
pub fn parse_phase(v: &str) -> Result<PhaseExpr, String> {
    let bad = || format!("`{v}` is not a phase (expected e.g. pi, -pi/2, 3pi/4 or radians)");
    let (head, den) = match v.split_once('/') {
        Some((h, d)) => (h, Some(d)),
        None => (v, None),
    };
    if let Some(num) = head.strip_suffix("pi") {
        let num: i64 = match num {
            "" | "+" => 1,
            "-" => -1,
            n => n.parse().map_err(|_| bad())?,
        };
        let den: u64 = match den {
            Some(d) => d.parse().ok().filter(|&d| d > 0).ok_or_else(bad)?,
            None => 1,
        };
        return Ok(PhaseExpr::PiFraction { num, den });
    }
    if den.is_some() {
        return Err(bad());
    }
    parse_float(v).map(PhaseExpr::Value).map_err(|_| bad())
}

/// Parses a `.qproto` source into a script, or every diagnostic found.
pub fn parse(src: &str) -> Result<Script, Vec<Diagnostic>> {
    let mut p = Parser {
        diags: Vec::new(),
        script: Script::default(),
        declared: HashMap::new(),
        declared_at: HashMap::new(),
        removed: HashMap::new(),
        detect_line: None,
    };
    let src = src.strip_prefix('\u{feff}').unwrap_or(src);
    let mut lines: Vec<(usize, Vec<Token<'_>>)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let code = raw.split_once('#').map_or(raw, |(c, _)| c);
        if let Some(tokens) = lex(code, i + 1, &mut p.diags) {
            if !tokens.is_empty() {
                lines.push((i + 1, tokens));
            }
        }
    }
    for (line, tokens) in &lines {
        if let ("cavity" | "atom" | "aux", Some(t)) = (tokens[0].text, tokens.get(1)) {
            p.declared_at.entry(t.text.to_string()).or_insert(*line);
        }
    }
    for (line, tokens) in &lines {
        p.statement(*line, tokens);
    }
    if p.diags.is_empty() {
        Ok(p.script)
    } else {
        p.diags.sort_by_key(|d| (d.line, d.col));
        Err(p.diags)
    }
}

/// Canonical text of a script; `parse(&print(s)) == Ok(s)`.
pub fn print(script: &Script) -> String {
    script.to_string()
}
