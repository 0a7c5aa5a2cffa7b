use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::MachineError;

/// Work-tape symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Zero,
    One,
    Blank,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

    pub fn index(self) -> usize {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
            Symbol::Blank => 2,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Symbol::One
        } else {
            Symbol::Zero
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Blank => '_',
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Write {
        bit: bool,
        dir: Move,
        next: StateId,
    },
    /// Request the next input bit and branch on it.
    Read {
        on_zero: StateId,
        on_one: StateId,
    },
    /// Append a bit to the output.
    Emit {
        bit: bool,
        next: StateId,
    },
    Halt,
    /// Loop forever.
    Spin,
}

impl Action {
    fn successors(self) -> impl Iterator<Item = StateId> {
        let (a, b) = match self {
            Action::Write { next, .. } | Action::Emit { next, .. } => (Some(next), None),
            Action::Read { on_zero, on_one } => (Some(on_zero), Some(on_one)),
            Action::Halt | Action::Spin => (None, None),
        };
        a.into_iter().chain(b)
    }
}

/// A validated transition table: exactly one action for every
/// (state, symbol) pair, and every referenced state exists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    name: String,
    state_names: Vec<String>,
    start: StateId,
    actions: Vec<[Action; 3]>,
}

impl Table {
    /// Builds a table from fully specified rows. Row order fixes state ids.
    pub fn new(
        name: impl Into<String>,
        state_names: Vec<String>,
        start: StateId,
        actions: Vec<[Action; 3]>,
    ) -> Result<Self, MachineError> {
        if state_names.len() != actions.len() {
            return Err(MachineError::Invalid("state name count does not match rows".into()));
        }
        if start.index() >= actions.len() {
            return Err(MachineError::Invalid("start state out of range".into()));
        }
        for (row, name) in actions.iter().zip(&state_names) {
            for action in row {
                if action.successors().any(|s| s.index() >= actions.len()) {
                    return Err(MachineError::Dangling {
                        state: name.clone(),
                        line: None,
                    });
                }
            }
        }
        let mut seen = BTreeMap::new();
        for name in &state_names {
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(MachineError::Invalid(alloc::format!("duplicate state name {name}")));
            }
        }
        Ok(Table {
            name: name.into(),
            state_names,
            start,
            actions,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn state_count(&self) -> usize {
        self.actions.len()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.state_names[id.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn action(&self, state: StateId, symbol: Symbol) -> Action {
        self.actions[state.index()][symbol.index()]
    }

    pub fn row(&self, state: StateId) -> &[Action; 3] {
        &self.actions[state.index()]
    }

    pub fn rows(&self) -> impl Iterator<Item = (StateId, &[Action; 3])> {
        self.actions.iter().enumerate().map(|(i, row)| (StateId(i as u32), row))
    }

    /// A copy that must first read `k` zeros; a 1 among them leads to a
    /// spin state.
    pub fn padded(&self, k: usize) -> Table {
        if k == 0 {
            return self.clone();
        }
        let fresh = |base: &str| {
            let mut candidate = base.to_string();
            while self.state_names.contains(&candidate) {
                candidate.push('\'');
            }
            candidate
        };
        let offset = self.state_count() as u32;
        let spin = StateId(offset + k as u32);
        let mut names = self.state_names.clone();
        let mut actions = self.actions.clone();
        for i in 0..k {
            names.push(fresh(&alloc::format!("pad{i}")));
            let on_zero = if i + 1 == k {
                self.start
            } else {
                StateId(offset + i as u32 + 1)
            };
            actions.push([Action::Read { on_zero, on_one: spin }; 3]);
        }
        names.push(fresh("padspin"));
        actions.push([Action::Spin; 3]);
        Table {
            name: alloc::format!("{}_pad{k}", self.name),
            state_names: names,
            start: StateId(offset),
            actions,
        }
    }
}

/// Two-way infinite work tape, blank everywhere initially.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Tape {
    right: Vec<Symbol>,
    left: Vec<Symbol>,
}

impl Tape {
    pub fn read(&self, pos: i64) -> Symbol {
        let cell = if pos >= 0 {
            self.right.get(pos as usize)
        } else {
            self.left.get((-pos - 1) as usize)
        };
        cell.copied().unwrap_or(Symbol::Blank)
    }

    pub fn write(&mut self, pos: i64, symbol: Symbol) {
        let (cells, idx) = if pos >= 0 {
            (&mut self.right, pos as usize)
        } else {
            (&mut self.left, (-pos - 1) as usize)
        };
        if cells.len() <= idx {
            cells.resize(idx + 1, Symbol::Blank);
        }
        cells[idx] = symbol;
    }
}

/// Finite-control state plus work tape of a running table machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TableConfig {
    pub state: StateId,
    pub head: i64,
    pub tape: Tape,
}

impl TableConfig {
    pub fn initial(table: &Table) -> Self {
        TableConfig {
            state: table.start(),
            head: 0,
            tape: Tape::default(),
        }
    }

    pub fn current_action(&self, table: &Table) -> Action {
        table.action(self.state, self.tape.read(self.head))
    }
}
