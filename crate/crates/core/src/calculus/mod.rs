//! Rule schemas, named calculi, derivations, checking, proof search and a
//! random derivation generator.

mod check;
mod derivation;
mod engine;
mod fuzz;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kripke::FrameClass;
use crate::syntax::{Formula, Side};

pub use check::{check_derivation, check_step, CheckError, StepError};
pub use derivation::{Derivation, DerivationFileError};
pub(crate) use engine::{Engine, Expansion, ProofTree};
pub use fuzz::{fuzz_derivations, FuzzConfig};
pub(crate) use search::{
    branching_step, closed_proof, forced_step, replay_chain, retained_premise,
};
pub use search::{default_limits, search, Limits, SearchOutcome, SearchStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    Id,
    Cut,
    EWL,
    EWR,
    TL,
    TR,
    BoxR,
    BoxL,
    NegL,
    NegR,
    AndL1,
    AndL2,
    AndR,
    OrL,
    OrR1,
    OrR2,
    EC,
    Sym,
    EW,
    EE,
    Drop,
    T,
    Merge,
}

impl RuleId {
    pub const ALL: [RuleId; 23] = [
        RuleId::Id,
        RuleId::Cut,
        RuleId::EWL,
        RuleId::EWR,
        RuleId::TL,
        RuleId::TR,
        RuleId::BoxR,
        RuleId::BoxL,
        RuleId::NegL,
        RuleId::NegR,
        RuleId::AndL1,
        RuleId::AndL2,
        RuleId::AndR,
        RuleId::OrL,
        RuleId::OrR1,
        RuleId::OrR2,
        RuleId::EC,
        RuleId::Sym,
        RuleId::EW,
        RuleId::EE,
        RuleId::Drop,
        RuleId::T,
        RuleId::Merge,
    ];

    /// Rules shared by every calculus.
    pub const BASE: [RuleId; 15] = [
        RuleId::Id,
        RuleId::EWL,
        RuleId::EWR,
        RuleId::TL,
        RuleId::TR,
        RuleId::BoxR,
        RuleId::BoxL,
        RuleId::NegL,
        RuleId::NegR,
        RuleId::AndL1,
        RuleId::AndL2,
        RuleId::AndR,
        RuleId::OrL,
        RuleId::OrR1,
        RuleId::OrR2,
    ];

    /// Whether an application names a main formula.
    pub fn has_principal(self) -> bool {
        !matches!(
            self,
            RuleId::EWL
                | RuleId::EWR
                | RuleId::EC
                | RuleId::Sym
                | RuleId::EW
                | RuleId::EE
                | RuleId::Drop
                | RuleId::Merge
        )
    }

    /// Side of the conclusion on which the main formula sits.
    pub fn principal_side(self) -> Option<Side> {
        use RuleId::*;
        match self {
            TL | BoxL | NegL | AndL1 | AndL2 | OrL | T => Some(Side::Left),
            TR | BoxR | NegR | AndR | OrR1 | OrR2 => Some(Side::Right),
            _ => None,
        }
    }

    pub fn premise_count(self) -> usize {
        match self {
            RuleId::Id => 0,
            RuleId::Cut | RuleId::AndR | RuleId::OrL => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        use RuleId::*;
        match self {
            Id => "Id",
            Cut => "Cut",
            EWL => "EWL",
            EWR => "EWR",
            TL => "TL",
            TR => "TR",
            BoxR => "BoxR",
            BoxL => "BoxL",
            NegL => "NegL",
            NegR => "NegR",
            AndL1 => "AndL1",
            AndL2 => "AndL2",
            AndR => "AndR",
            OrL => "OrL",
            OrR1 => "OrR1",
            OrR2 => "OrR2",
            EC => "EC",
            Sym => "Sym",
            EW => "EW",
            EE => "EE",
            Drop => "Drop",
            T => "T",
            Merge => "Merge",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One rule instance: the rule, where it acts, and its main formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleApp {
    pub rule: RuleId,
    /// Position of the (left-)main component; see [`check_step`] for each
    /// rule's convention.
    pub component: usize,
    pub aux: Option<usize>,
    pub principal: Option<Formula>,
    pub side: Option<Side>,
}

impl RuleApp {
    pub fn new(rule: RuleId, component: usize) -> Self {
        RuleApp {
            rule,
            component,
            aux: None,
            principal: None,
            side: None,
        }
    }

    pub fn with_principal(rule: RuleId, component: usize, principal: Formula) -> Self {
        let aux = match rule {
            RuleId::BoxL => Some(component + 1),
            _ => None,
        };
        RuleApp {
            rule,
            component,
            aux,
            principal: Some(principal),
            side: rule.principal_side(),
        }
    }

    pub fn pair(rule: RuleId, component: usize) -> Self {
        RuleApp {
            rule,
            component,
            aux: Some(component + 1),
            principal: None,
            side: None,
        }
    }
}

impl fmt::Display for RuleApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.rule, self.component)?;
        if let Some(p) = &self.principal {
            write!(f, " [{p}]")?;
        }
        Ok(())
    }
}

/// The named hypersequent systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    RK,
    RD,
    RT,
    RKB,
    RK4,
    RB,
    RS4,
    RS5,
    RTB,
}

impl System {
    pub const ALL: [System; 9] = [
        System::RK,
        System::RD,
        System::RT,
        System::RKB,
        System::RK4,
        System::RB,
        System::RS4,
        System::RS5,
        System::RTB,
    ];

    pub fn extra_rules(self) -> &'static [RuleId] {
        use RuleId::*;
        match self {
            System::RK => &[],
            System::RD => &[Drop],
            System::RT => &[EC],
            System::RKB => &[Sym],
            System::RK4 => &[EW],
            System::RB => &[EC, Sym],
            System::RS4 => &[EC, EW],
            System::RS5 => &[EC, EW, EE],
            System::RTB => &[T, Sym],
        }
    }

    pub fn frame_class(self) -> FrameClass {
        match self {
            System::RK => FrameClass::K,
            System::RD => FrameClass::D,
            System::RT => FrameClass::T,
            System::RKB => FrameClass::KB,
            System::RK4 => FrameClass::K4,
            System::RB | System::RTB => FrameClass::B,
            System::RS4 => FrameClass::S4,
            System::RS5 => FrameClass::S5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::RK => "RK",
            System::RD => "RD",
            System::RT => "RT",
            System::RKB => "RKB",
            System::RK4 => "RK4",
            System::RB => "RB",
            System::RS4 => "RS4",
            System::RS5 => "RS5",
            System::RTB => "RTB",
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        System::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown system `{s}`"))
    }
}

/// A set of enabled rules plus the Cut switch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalculusSpec {
    pub name: String,
    pub rules: BTreeSet<RuleId>,
    pub cut: bool,
}

impl CalculusSpec {
    pub fn system(sys: System) -> Self {
        let mut rules: BTreeSet<RuleId> = RuleId::BASE.into_iter().collect();
        rules.extend(sys.extra_rules());
        CalculusSpec {
            name: sys.name().to_string(),
            rules,
            cut: false,
        }
    }

    pub fn with_cut(mut self) -> Self {
        self.cut = true;
        self.name.push_str("+Cut");
        self
    }

    /// Adds rules outside the named system, e.g. Merge.
    pub fn with_rules(mut self, extra: &[RuleId]) -> Self {
        for &r in extra {
            if self.rules.insert(r) {
                self.name.push('+');
                self.name.push_str(r.name());
            }
        }
        self
    }

    pub fn enabled(&self, rule: RuleId) -> bool {
        if rule == RuleId::Cut {
            self.cut
        } else {
            self.rules.contains(&rule)
        }
    }
}

impl From<System> for CalculusSpec {
    fn from(s: System) -> Self {
        CalculusSpec::system(s)
    }
}
