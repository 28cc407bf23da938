//! Agents, objects, weak orders with a null marker, and the text format.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A participant on one side of the market, or that side's null marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Entity {
    Agent(usize),
    Object(usize),
    Null,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Agent,
    Object,
}

impl Side {
    fn entity(self, index: usize) -> Entity {
        match self {
            Side::Agent => Entity::Agent(index),
            Side::Object => Entity::Object(index),
        }
    }
}

/// Model tiers, ordered from most to least restrictive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTier {
    /// Equal sides, strict orders, everyone acceptable.
    Base,
    /// Equal sides, ties allowed, everyone acceptable.
    #[serde(rename = "weak")]
    WeakOrders,
    /// Ties, unacceptability and unequal sides.
    Generalized,
}

impl ModelTier {
    pub const ALL: [ModelTier; 3] = [ModelTier::Base, ModelTier::WeakOrders, ModelTier::Generalized];

    pub fn name(self) -> &'static str {
        match self {
            ModelTier::Base => "base",
            ModelTier::WeakOrders => "weak",
            ModelTier::Generalized => "generalized",
        }
    }

    pub fn from_name(name: &str) -> Option<ModelTier> {
        match name {
            "base" => Some(ModelTier::Base),
            "weak" | "weak-orders" => Some(ModelTier::WeakOrders),
            "generalized" | "general" => Some(ModelTier::Generalized),
            _ => None,
        }
    }

    /// Whether matchings of this tier must be bistochastic.
    pub fn is_square(self) -> bool {
        self != ModelTier::Generalized
    }
}

impl fmt::Display for ModelTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Better,
    Tied,
    Worse,
}

/// A complete weak order over one side plus the null marker, best tier first.
///
/// Entities inside a tier are kept sorted by index so equal orders compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakOrder {
    side: Side,
    tiers: Vec<Vec<Entity>>,
    ranks: Vec<usize>,
    null_rank: usize,
}

impl WeakOrder {
    /// Builds an order over `len` entities of `side`; `owner` only labels errors.
    pub fn new(side: Side, len: usize, tiers: Vec<Vec<Entity>>, owner: &str) -> Result<WeakOrder> {
        let mut ranks = vec![usize::MAX; len];
        let mut null_rank = None;
        let mut sorted = Vec::with_capacity(tiers.len());
        for (rank, mut tier) in tiers.into_iter().enumerate() {
            if tier.is_empty() {
                return Err(Error::NotRankable(format!("empty tie in order of `{owner}`")));
            }
            for &e in &tier {
                let slot = match (side, e) {
                    (_, Entity::Null) => &mut null_rank,
                    (Side::Agent, Entity::Agent(i)) | (Side::Object, Entity::Object(i)) if i < len => {
                        if ranks[i] != usize::MAX {
                            return Err(Error::DuplicateEntity(format!("{e:?} in order of `{owner}`")));
                        }
                        ranks[i] = rank;
                        continue;
                    }
                    _ => return Err(Error::NotRankable(format!("{e:?} in order of `{owner}`"))),
                };
                if slot.is_some() {
                    return Err(Error::DuplicateEntity(format!("@ in order of `{owner}`")));
                }
                *slot = Some(rank);
                if tier.len() > 1 {
                    return Err(Error::NullTied(owner.to_string()));
                }
            }
            tier.sort();
            sorted.push(tier);
        }
        if let Some(i) = ranks.iter().position(|&r| r == usize::MAX) {
            return Err(Error::MissingEntity {
                owner: owner.to_string(),
                missing: format!("{:?}", side.entity(i)),
            });
        }
        let null_rank = null_rank.ok_or_else(|| Error::MissingEntity {
            owner: owner.to_string(),
            missing: "@".to_string(),
        })?;
        Ok(WeakOrder {
            side,
            tiers: sorted,
            ranks,
            null_rank,
        })
    }

    /// A strict order listing `order` first-to-last with the null marker at `null_pos`.
    pub fn strict(side: Side, order: &[usize], null_pos: usize) -> Result<WeakOrder> {
        let mut tiers: Vec<Vec<Entity>> = order.iter().map(|&i| vec![side.entity(i)]).collect();
        tiers.insert(null_pos.min(tiers.len()), vec![Entity::Null]);
        WeakOrder::new(side, order.len(), tiers, "strict order")
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn tiers(&self) -> &[Vec<Entity>] {
        &self.tiers
    }

    /// Tier index of a real entity; smaller is better.
    pub fn rank_of(&self, index: usize) -> usize {
        self.ranks[index]
    }

    pub fn null_rank(&self) -> usize {
        self.null_rank
    }

    pub fn rank(&self, e: Entity) -> Option<usize> {
        match (self.side, e) {
            (_, Entity::Null) => Some(self.null_rank),
            (Side::Agent, Entity::Agent(i)) | (Side::Object, Entity::Object(i)) => self.ranks.get(i).copied(),
            _ => None,
        }
    }

    /// Real entity ranked strictly above the null marker.
    pub fn accepts(&self, index: usize) -> bool {
        self.ranks[index] < self.null_rank
    }

    pub fn is_strict(&self) -> bool {
        self.tiers.iter().all(|t| t.len() == 1)
    }

    pub fn null_last(&self) -> bool {
        self.null_rank + 1 == self.tiers.len()
    }

    /// Real entities best first, ties broken by index.
    pub fn tie_broken(&self) -> Vec<usize> {
        self.tiers
            .iter()
            .flatten()
            .filter_map(|e| match e {
                Entity::Agent(i) | Entity::Object(i) => Some(*i),
                Entity::Null => None,
            })
            .collect()
    }

    /// Acceptable entities only, best first, ties broken by index.
    pub fn acceptable_tie_broken(&self) -> Vec<usize> {
        self.tie_broken().into_iter().filter(|&i| self.accepts(i)).collect()
    }
}

/// A matching market: agents and objects with weak orders over the other side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    agent_labels: Vec<String>,
    object_labels: Vec<String>,
    prefs: Vec<WeakOrder>,
    prios: Vec<WeakOrder>,
}

impl Instance {
    pub fn new(
        agent_labels: Vec<String>,
        object_labels: Vec<String>,
        prefs: Vec<WeakOrder>,
        prios: Vec<WeakOrder>,
    ) -> Result<Instance> {
        check_labels(&agent_labels)?;
        check_labels(&object_labels)?;
        let (n, m) = (agent_labels.len(), object_labels.len());
        if prefs.len() != n || prios.len() != m {
            return Err(Error::NotRankable(format!(
                "expected {n} preference and {m} priority orders, got {} and {}",
                prefs.len(),
                prios.len()
            )));
        }
        if prefs.iter().any(|w| w.side != Side::Object || w.len() != m)
            || prios.iter().any(|w| w.side != Side::Agent || w.len() != n)
        {
            return Err(Error::NotRankable("order ranks the wrong side".to_string()));
        }
        Ok(Instance {
            agent_labels,
            object_labels,
            prefs,
            prios,
        })
    }

    /// Agents labelled `1..=n`.
    pub fn numbered_agents(n: usize) -> Vec<String> {
        (1..=n).map(|i| i.to_string()).collect()
    }

    pub fn n(&self) -> usize {
        self.agent_labels.len()
    }

    pub fn m(&self) -> usize {
        self.object_labels.len()
    }

    pub fn agent_labels(&self) -> &[String] {
        &self.agent_labels
    }

    pub fn object_labels(&self) -> &[String] {
        &self.object_labels
    }

    pub fn agent_label(&self, i: usize) -> &str {
        &self.agent_labels[i]
    }

    pub fn object_label(&self, o: usize) -> &str {
        &self.object_labels[o]
    }

    pub fn agent_index(&self, label: &str) -> Option<usize> {
        self.agent_labels.iter().position(|l| l == label)
    }

    pub fn object_index(&self, label: &str) -> Option<usize> {
        self.object_labels.iter().position(|l| l == label)
    }

    pub fn pref(&self, i: usize) -> &WeakOrder {
        &self.prefs[i]
    }

    pub fn prio(&self, o: usize) -> &WeakOrder {
        &self.prios[o]
    }

    /// Rank of object `o` in agent `i`'s preferences.
    pub fn agent_rank(&self, i: usize, o: usize) -> usize {
        self.prefs[i].rank_of(o)
    }

    /// Rank of agent `i` in object `o`'s priorities.
    pub fn object_rank(&self, o: usize, i: usize) -> usize {
        self.prios[o].rank_of(i)
    }

    pub fn agent_accepts(&self, i: usize, o: usize) -> bool {
        self.prefs[i].accepts(o)
    }

    pub fn object_accepts(&self, o: usize, i: usize) -> bool {
        self.prios[o].accepts(i)
    }

    /// `o ≻_i ∅` and `i ≻_o ∅`.
    pub fn is_acceptable_pair(&self, i: usize, o: usize) -> bool {
        self.agent_accepts(i, o) && self.object_accepts(o, i)
    }

    pub fn compare(&self, who: Entity, a: Entity, b: Entity) -> Result<Comparison> {
        let order = match who {
            Entity::Agent(i) if i < self.n() => &self.prefs[i],
            Entity::Object(o) if o < self.m() => &self.prios[o],
            _ => return Err(Error::NotRankable(format!("{who:?} ranks nothing"))),
        };
        let rank = |e| {
            order
                .rank(e)
                .ok_or_else(|| Error::NotRankable(format!("{e:?} by {who:?}")))
        };
        Ok(match rank(a)?.cmp(&rank(b)?) {
            Ordering::Less => Comparison::Better,
            Ordering::Equal => Comparison::Tied,
            Ordering::Greater => Comparison::Worse,
        })
    }

    pub fn is_strict(&self) -> bool {
        self.prefs.iter().chain(&self.prios).all(WeakOrder::is_strict)
    }

    pub fn classify_tier(&self) -> ModelTier {
        let square = self.n() == self.m();
        if !square || !self.prefs.iter().chain(&self.prios).all(WeakOrder::null_last) {
            ModelTier::Generalized
        } else if self.is_strict() {
            ModelTier::Base
        } else {
            ModelTier::WeakOrders
        }
    }

    /// Resolves an optional claimed tier against the detected one.
    pub fn resolve_tier(&self, claimed: Option<ModelTier>) -> Result<ModelTier> {
        let detected = self.classify_tier();
        match claimed {
            Some(claimed) if claimed < detected => Err(Error::TierTooStrict { claimed, detected }),
            Some(claimed) => Ok(claimed),
            None => Ok(detected),
        }
    }

    pub fn parse(text: &str) -> Result<Instance> {
        parse_instance(text)
    }

    /// Canonical text form; `parse(render(x)) == x`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if self.agent_labels == Instance::numbered_agents(self.n()) {
            out.push_str(&format!("agents: {}\n", self.n()));
        } else {
            out.push_str(&format!("agents: {}\n", self.agent_labels.join(" ")));
        }
        out.push_str("objects:");
        for l in &self.object_labels {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
        for (i, w) in self.prefs.iter().enumerate() {
            out.push_str(&format!("pref {}: {}\n", self.agent_labels[i], self.render_order(w)));
        }
        for (o, w) in self.prios.iter().enumerate() {
            out.push_str(&format!("prio {}: {}\n", self.object_labels[o], self.render_order(w)));
        }
        out
    }

    pub fn entity_label(&self, e: Entity) -> &str {
        match e {
            Entity::Agent(i) => &self.agent_labels[i],
            Entity::Object(o) => &self.object_labels[o],
            Entity::Null => "@",
        }
    }

    fn render_order(&self, w: &WeakOrder) -> String {
        let items: Vec<String> = w
            .tiers
            .iter()
            .map(|tier| {
                let names: Vec<&str> = tier.iter().map(|&e| self.entity_label(e)).collect();
                if names.len() == 1 {
                    names[0].to_string()
                } else {
                    format!("[{}]", names.join(" "))
                }
            })
            .collect();
        items.join(" > ")
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty() && s != "@" && !s.chars().any(|c| c.is_whitespace() || "[]>#:=@".contains(c))
}

fn check_labels(labels: &[String]) -> Result<()> {
    let mut seen = HashMap::new();
    for l in labels {
        if !is_name(l) {
            return Err(Error::NotRankable(format!("invalid label `{l}`")));
        }
        if seen.insert(l.as_str(), ()).is_some() {
            return Err(Error::DuplicateEntity(l.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Name(&'a str),
    Gt,
    Open,
    Close,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits `text` (starting at 1-based `col0`) into tokens with their columns.
fn tokenize(text: &str, line: usize, col0: usize) -> Result<Vec<(Token<'_>, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let col = col0 + text[..pos].chars().count();
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '>' | '[' | ']' => {
                chars.next();
                out.push((
                    match c {
                        '>' => Token::Gt,
                        '[' => Token::Open,
                        _ => Token::Close,
                    },
                    col,
                ));
            }
            ':' | '=' => return Err(syntax(line, col, format!("unexpected `{c}`"))),
            _ => {
                let start = pos;
                let mut end = text.len();
                while let Some(&(p, c)) = chars.peek() {
                    if c.is_whitespace() || "[]>:=".contains(c) {
                        end = p;
                        break;
                    }
                    chars.next();
                }
                out.push((Token::Name(&text[start..end]), col));
            }
        }
    }
    Ok(out)
}

/// Parses a rank expression into tiers of raw names.
fn parse_rank_expr<'a>(
    tokens: &[(Token<'a>, usize)],
    line: usize,
    end_col: usize,
) -> Result<Vec<Vec<(&'a str, usize)>>> {
    let mut tiers = Vec::new();
    let mut k = 0;
    let col_at = |k: usize| tokens.get(k).map_or(end_col, |t| t.1);
    loop {
        match tokens.get(k) {
            Some((Token::Name(n), c)) => {
                tiers.push(vec![(*n, *c)]);
                k += 1;
            }
            Some((Token::Open, _)) => {
                k += 1;
                let mut tie = Vec::new();
                while let Some((Token::Name(n), c)) = tokens.get(k) {
                    tie.push((*n, *c));
                    k += 1;
                }
                match tokens.get(k) {
                    Some((Token::Close, _)) if !tie.is_empty() => k += 1,
                    Some((Token::Close, c)) => return Err(syntax(line, *c, "empty tie")),
                    _ => return Err(syntax(line, col_at(k), "expected `]`")),
                }
                tiers.push(tie);
            }
            _ => return Err(syntax(line, col_at(k), "expected a name or `[`")),
        }
        match tokens.get(k) {
            None => return Ok(tiers),
            Some((Token::Gt, _)) => k += 1,
            Some((_, c)) => return Err(syntax(line, *c, "expected `>`")),
        }
    }
}

/// Parses the canonical instance format.
///
/// ```text
/// agents: 3
/// objects: x y z
/// pref 1: x > [y z] > @
/// prio x: 2 > 1 > @ > 3
/// ```
///
/// `agents:` takes either a count (agents named `1..=n`) or a list of names.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut agents: Option<Vec<String>> = None;
    let mut objects: Option<Vec<String>> = None;
    let mut prefs: Vec<Option<WeakOrder>> = Vec::new();
    let mut prios: Vec<Option<WeakOrder>> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(colon) = content.find(':') else {
            return Err(syntax(line, content.chars().count() + 1, "expected `:`"));
        };
        let head = &content[..colon];
        let body = &content[colon + 1..];
        let body_col = content[..=colon].chars().count() + 1;
        let end_col = content.chars().count() + 1;
        let words: Vec<&str> = head.split_whitespace().collect();
        let lead = head.len() - head.trim_start().len() + 1;
        match words.as_slice() {
            ["agents"] | ["objects"] => {
                let is_agents = words[0] == "agents";
                let slot = if is_agents { &mut agents } else { &mut objects };
                if slot.is_some() {
                    return Err(syntax(line, lead, format!("`{}` declared twice", words[0])));
                }
                if !prefs.is_empty() || !prios.is_empty() {
                    return Err(syntax(line, lead, "declarations must precede orders"));
                }
                let names: Vec<&str> = body.split_whitespace().collect();
                let labels: Vec<String> = match names.as_slice() {
                    [count] if is_agents && count.bytes().all(|b| b.is_ascii_digit()) => {
                        let n: usize = count
                            .parse()
                            .map_err(|_| syntax(line, body_col, "agent count out of range"))?;
                        Instance::numbered_agents(n)
                    }
                    _ => names.iter().map(|s| s.to_string()).collect(),
                };
                for (k, l) in labels.iter().enumerate() {
                    if !is_name(l) {
                        return Err(syntax(line, body_col, format!("invalid name `{l}`")));
                    }
                    if labels[..k].contains(l) {
                        return Err(Error::DuplicateEntity(l.clone()));
                    }
                }
                *slot = Some(labels);
            }
            [kind @ ("pref" | "prio"), owner] => {
                let (Some(agents), Some(objects)) = (&agents, &objects) else {
                    return Err(syntax(line, lead, "`agents:` and `objects:` must come first"));
                };
                if prefs.is_empty() && prios.is_empty() {
                    prefs = vec![None; agents.len()];
                    prios = vec![None; objects.len()];
                }
                let is_pref = *kind == "pref";
                let (owners, ranked, side) = if is_pref {
                    (agents, objects, Side::Object)
                } else {
                    (objects, agents, Side::Agent)
                };
                let idx = owners
                    .iter()
                    .position(|l| l == owner)
                    .ok_or_else(|| Error::UnknownEntity(owner.to_string()))?;
                let tokens = tokenize(body, line, body_col)?;
                let raw_tiers = parse_rank_expr(&tokens, line, end_col)?;
                let mut tiers = Vec::with_capacity(raw_tiers.len());
                for tier in raw_tiers {
                    let mut t = Vec::with_capacity(tier.len());
                    for (name, col) in tier {
                        if name == "@" {
                            t.push(Entity::Null);
                        } else {
                            let k = ranked
                                .iter()
                                .position(|l| l == name)
                                .ok_or_else(|| syntax(line, col, format!("unknown entity `{name}`")))?;
                            t.push(side.entity(k));
                        }
                    }
                    tiers.push(t);
                }
                if let Some(k) = (0..ranked.len()).find(|&k| !tiers.iter().flatten().any(|&e| e == side.entity(k))) {
                    return Err(Error::MissingEntity {
                        owner: owner.to_string(),
                        missing: ranked[k].clone(),
                    });
                }
                let order = WeakOrder::new(side, ranked.len(), tiers, owner)?;
                let slots = if is_pref { &mut prefs } else { &mut prios };
                if slots[idx].is_some() {
                    return Err(syntax(line, lead, format!("second {kind} line for `{owner}`")));
                }
                slots[idx] = Some(order);
            }
            _ => return Err(syntax(line, lead, format!("unknown directive `{}`", head.trim()))),
        }
    }

    let agents = agents.ok_or_else(|| syntax(1, 1, "missing `agents:`"))?;
    let objects = objects.ok_or_else(|| syntax(1, 1, "missing `objects:`"))?;
    if prefs.is_empty() && prios.is_empty() {
        prefs = vec![None; agents.len()];
        prios = vec![None; objects.len()];
    }
    let missing = |labels: &[String], k: usize, kind: &str| Error::MissingEntity {
        owner: labels[k].clone(),
        missing: format!("{kind} line"),
    };
    let prefs = prefs
        .into_iter()
        .enumerate()
        .map(|(k, w)| w.ok_or_else(|| missing(&agents, k, "pref")))
        .collect::<Result<Vec<_>>>()?;
    let prios = prios
        .into_iter()
        .enumerate()
        .map(|(k, w)| w.ok_or_else(|| missing(&objects, k, "prio")))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(agents, objects, prefs, prios)
}
