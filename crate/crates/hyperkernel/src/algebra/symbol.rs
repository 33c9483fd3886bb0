use std::cmp::Ordering;
use std::fmt;
use std::sync::RwLock;

/// What role a name plays. The kind participates in the canonical variable
/// order, so a shift variable always sorts before a series variable and a
/// series variable before a parameter, regardless of interning order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum SymbolKind {
    Shift,
    Series,
    Parameter,
}

struct SymbolData {
    name: &'static str,
    kind: SymbolKind,
}

static REGISTRY: RwLock<Vec<SymbolData>> = RwLock::new(Vec::new());

/// An interned name. Two symbols are identical exactly when both the name
/// and the kind agree; comparison follows the canonical order (kind, name)
/// and is stable across processes.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub fn new(name: &str, kind: SymbolKind) -> Symbol {
        {
            let reg = REGISTRY.read().unwrap();
            if let Some(i) = reg.iter().position(|d| d.kind == kind && d.name == name) {
                return Symbol(i as u32);
            }
        }
        let mut reg = REGISTRY.write().unwrap();
        if let Some(i) = reg.iter().position(|d| d.kind == kind && d.name == name) {
            return Symbol(i as u32);
        }
        reg.push(SymbolData {
            name: Box::leak(name.to_owned().into_boxed_str()),
            kind,
        });
        Symbol((reg.len() - 1) as u32)
    }

    pub fn shift(name: &str) -> Symbol {
        Symbol::new(name, SymbolKind::Shift)
    }

    pub fn series(name: &str) -> Symbol {
        Symbol::new(name, SymbolKind::Series)
    }

    pub fn param(name: &str) -> Symbol {
        Symbol::new(name, SymbolKind::Parameter)
    }

    /// Find an already-interned symbol by name alone. When the same name
    /// was interned under several kinds, the smallest kind wins (Shift,
    /// then Series, then Parameter).
    pub fn lookup(name: &str) -> Option<Symbol> {
        let reg = REGISTRY.read().unwrap();
        let mut best: Option<(SymbolKind, usize)> = None;
        for (i, d) in reg.iter().enumerate() {
            if d.name == name && best.map_or(true, |(k, _)| d.kind < k) {
                best = Some((d.kind, i));
            }
        }
        best.map(|(_, i)| Symbol(i as u32))
    }

    pub fn name(self) -> &'static str {
        REGISTRY.read().unwrap()[self.0 as usize].name
    }

    pub fn kind(self) -> SymbolKind {
        REGISTRY.read().unwrap()[self.0 as usize].kind
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Symbol) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        let reg = REGISTRY.read().unwrap();
        let a = &reg[self.0 as usize];
        let b = &reg[other.0 as usize];
        a.kind.cmp(&b.kind).then_with(|| a.name.cmp(b.name))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Symbol) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.name(), self.kind())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let a = Symbol::shift("n");
        let b = Symbol::shift("n");
        assert_eq!(a, b);
        assert_eq!(a.name(), "n");
        assert_eq!(a.kind(), SymbolKind::Shift);
    }

    #[test]
    fn same_name_different_kind_is_distinct() {
        let a = Symbol::shift("t_sym_kind");
        let b = Symbol::param("t_sym_kind");
        assert_ne!(a, b);
    }

    #[test]
    fn order_is_kind_then_name() {
        let n = Symbol::shift("zz_n");
        let x = Symbol::series("aa_x");
        let eps = Symbol::param("aa_eps");
        assert!(n < x);
        assert!(x < eps);
        assert!(Symbol::shift("k") < Symbol::shift("n"));
    }
}
