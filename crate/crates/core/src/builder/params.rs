//! Parameter tree: configuration values that mirror the module tree and are
//! inherited top-down.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ParamValue {
    Int(i64),
    Str(String),
}

impl ParamValue {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            ParamValue::Int(i) => Some(*i),
            ParamValue::Str(_) => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Str(s) => write!(f, "{s}"),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<i32> for ParamValue {
    fn from(v: i32) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Str(v.to_string())
    }
}

/// One configuration scope. `pattern` is matched against module names
/// (`*` matches any run of characters); the root's pattern is ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamTree {
    pattern: String,
    values: BTreeMap<String, ParamValue>,
    children: Vec<ParamTree>,
}

impl ParamTree {
    pub fn new() -> ParamTree {
        ParamTree::default()
    }

    pub fn set(mut self, key: &str, value: impl Into<ParamValue>) -> ParamTree {
        self.values.insert(key.to_string(), value.into());
        self
    }

    /// Adds a nested scope applied to modules whose name matches `pattern`.
    pub fn child(mut self, pattern: &str, f: impl FnOnce(ParamTree) -> ParamTree) -> ParamTree {
        let node = f(ParamTree {
            pattern: pattern.to_string(),
            ..ParamTree::default()
        });
        self.children.push(node);
        self
    }

    /// Parameters visible at the given module path (outermost first).
    pub fn resolve_path(&self, path: &[&str]) -> ParamScope {
        let mut scope = ParamScope::root(self);
        for name in path {
            scope = scope.enter(name);
        }
        scope
    }

    pub fn resolve(&self, path: &[&str], key: &str) -> Option<ParamValue> {
        self.resolve_path(path).get(key).cloned()
    }
}

/// Active configuration at one point of the module tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamScope {
    active: Vec<ParamTree>,
    values: BTreeMap<String, ParamValue>,
}

impl ParamScope {
    pub fn root(tree: &ParamTree) -> ParamScope {
        ParamScope {
            active: vec![tree.clone()],
            values: tree.values.clone(),
        }
    }

    /// Scope of a child module named `name`: every active node's matching
    /// children become active, and their values override inherited ones.
    pub fn enter(&self, name: &str) -> ParamScope {
        let mut next = self.clone();
        for node in &self.active {
            for child in &node.children {
                if glob_match(&child.pattern, name) {
                    for (k, v) in &child.values {
                        next.values.insert(k.clone(), v.clone());
                    }
                    next.active.push(child.clone());
                }
            }
        }
        next
    }

    pub fn get(&self, key: &str) -> Option<&ParamValue> {
        self.values.get(key)
    }

    pub fn values(&self) -> &BTreeMap<String, ParamValue> {
        &self.values
    }

    pub(crate) fn insert(&mut self, key: &str, value: ParamValue) {
        self.values.insert(key.to_string(), value);
    }
}

fn glob_match(pattern: &str, name: &str) -> bool {
    fn go(p: &[u8], n: &[u8]) -> bool {
        match p.split_first() {
            None => n.is_empty(),
            Some((b'*', rest)) => (0..=n.len()).any(|i| go(rest, &n[i..])),
            Some((c, rest)) => n.first() == Some(c) && go(rest, &n[1..]),
        }
    }
    go(pattern.as_bytes(), name.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adders_config() -> ParamTree {
        ParamTree::new()
            .child("RippleCarry", |n| n.set("w", 32))
            .child("KoggeStone", |n| n.set("w", 64))
    }

    #[test]
    fn matcher_per_module() {
        let t = adders_config();
        assert_eq!(t.resolve(&["RippleCarry"], "w"), Some(ParamValue::Int(32)));
        assert_eq!(t.resolve(&["KoggeStone"], "w"), Some(ParamValue::Int(64)));
        assert_eq!(t.resolve(&["FullAdder"], "w"), None);
    }

    #[test]
    fn children_inherit() {
        let t = adders_config();
        assert_eq!(t.resolve(&["RippleCarry", "FullAdder"], "w"), Some(ParamValue::Int(32)));
    }

    #[test]
    fn siblings_do_not_leak() {
        let t = ParamTree::new()
            .child("A", |n| n.set("depth", 1))
            .child("B", |n| n.set("width", 2));
        assert_eq!(t.resolve(&["A"], "width"), None);
        assert_eq!(t.resolve(&["B"], "depth"), None);
    }

    #[test]
    fn nearest_definition_wins() {
        let t = ParamTree::new().set("w", 4).child("Top", |n| {
            n.set("w", 8).child("Leaf*", |m| m.set("w", 16))
        });
        assert_eq!(t.resolve(&[], "w"), Some(ParamValue::Int(4)));
        assert_eq!(t.resolve(&["Top"], "w"), Some(ParamValue::Int(8)));
        assert_eq!(t.resolve(&["Top", "Mid"], "w"), Some(ParamValue::Int(8)));
        assert_eq!(t.resolve(&["Top", "Mid", "LeafA"], "w"), Some(ParamValue::Int(16)));
    }

    #[test]
    fn glob() {
        assert!(glob_match("*", "anything"));
        assert!(glob_match("Ripple*", "RippleCarry"));
        assert!(!glob_match("Ripple", "RippleCarry"));
        assert!(glob_match("*Carry", "RippleCarry"));
    }
}
