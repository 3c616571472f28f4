//! Tree-shaped containers for vectorized construction.

use super::BuildError;

/// A tree of named or positional children whose leaves hold values
/// (typically signals). Functions mapped over arrays preserve the shape and
/// the names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HArray<T> {
    Leaf(T),
    Node(Vec<(Option<String>, HArray<T>)>),
}

impl<T> HArray<T> {
    pub fn leaf(v: T) -> HArray<T> {
        HArray::Leaf(v)
    }

    /// Positional array of leaves.
    pub fn list(items: impl IntoIterator<Item = T>) -> HArray<T> {
        HArray::Node(items.into_iter().map(|v| (None, HArray::Leaf(v))).collect())
    }

    /// Positional array of sub-arrays.
    pub fn nest(items: impl IntoIterator<Item = HArray<T>>) -> HArray<T> {
        HArray::Node(items.into_iter().map(|v| (None, v)).collect())
    }

    /// Named children, in the given order.
    pub fn bundle(items: impl IntoIterator<Item = (impl Into<String>, HArray<T>)>) -> HArray<T> {
        HArray::Node(items.into_iter().map(|(k, v)| (Some(k.into()), v)).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            HArray::Leaf(_) => 1,
            HArray::Node(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, HArray::Node(c) if c.is_empty())
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, HArray::Leaf(_))
    }

    pub fn as_leaf(&self) -> Option<&T> {
        match self {
            HArray::Leaf(v) => Some(v),
            HArray::Node(_) => None,
        }
    }

    /// Leaf value; panics on a node. For use where the shape is known.
    pub fn value(&self) -> &T {
        self.as_leaf().expect("HArray::value on a node")
    }

    pub fn get(&self, name: &str) -> Option<&HArray<T>> {
        match self {
            HArray::Node(c) => c.iter().find(|(k, _)| k.as_deref() == Some(name)).map(|(_, v)| v),
            HArray::Leaf(_) => None,
        }
    }

    pub fn at(&self, i: usize) -> Option<&HArray<T>> {
        match self {
            HArray::Node(c) => c.get(i).map(|(_, v)| v),
            HArray::Leaf(_) => None,
        }
    }

    /// `array[:, name]`: the named child of every element.
    pub fn column(&self, name: &str) -> Result<HArray<T>, BuildError>
    where
        T: Clone,
    {
        match self {
            HArray::Node(c) => c
                .iter()
                .map(|(k, v)| {
                    v.get(name)
                        .cloned()
                        .map(|x| (k.clone(), x))
                        .ok_or_else(|| BuildError::Shape(format!("no field `{name}`")))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(HArray::Node),
            HArray::Leaf(_) => Err(BuildError::Shape("column of a leaf".into())),
        }
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&T> {
        let mut out = Vec::new();
        fn walk<'a, T>(a: &'a HArray<T>, out: &mut Vec<&'a T>) {
            match a {
                HArray::Leaf(v) => out.push(v),
                HArray::Node(c) => c.iter().for_each(|(_, v)| walk(v, out)),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn map<U>(&self, f: &mut impl FnMut(&T) -> U) -> HArray<U> {
        match self {
            HArray::Leaf(v) => HArray::Leaf(f(v)),
            HArray::Node(c) => HArray::Node(c.iter().map(|(k, v)| (k.clone(), v.map(f))).collect()),
        }
    }

    pub fn try_map<U, E>(&self, f: &mut impl FnMut(&T) -> Result<U, E>) -> Result<HArray<U>, E> {
        Ok(match self {
            HArray::Leaf(v) => HArray::Leaf(f(v)?),
            HArray::Node(c) => HArray::Node(
                c.iter()
                    .map(|(k, v)| Ok((k.clone(), v.try_map(f)?)))
                    .collect::<Result<_, E>>()?,
            ),
        })
    }

    /// Shape as nested child counts; a leaf has shape `[]`.
    pub fn shape(&self) -> Vec<usize> {
        match self {
            HArray::Leaf(_) => vec![],
            HArray::Node(c) => {
                let mut s = vec![c.len()];
                if let Some((_, first)) = c.first() {
                    s.extend(first.shape());
                }
                s
            }
        }
    }
}

/// Applies `f` across several arrays elementwise. Leaves broadcast against
/// nodes; nodes must agree in length. Names come from the first node
/// argument at each level.
pub fn zip_map<T: Clone, U>(
    args: &[HArray<T>],
    f: &mut impl FnMut(&[T]) -> Result<U, BuildError>,
) -> Result<HArray<U>, BuildError> {
    let lens: Vec<usize> = args
        .iter()
        .filter_map(|a| match a {
            HArray::Node(c) => Some(c.len()),
            HArray::Leaf(_) => None,
        })
        .collect();
    if lens.is_empty() {
        let vals: Vec<T> = args.iter().map(|a| a.value().clone()).collect();
        return Ok(HArray::Leaf(f(&vals)?));
    }
    if lens.iter().any(|l| *l != lens[0]) {
        return Err(BuildError::Shape(format!("array lengths differ: {lens:?}")));
    }
    let names: Vec<Option<String>> = args
        .iter()
        .find_map(|a| match a {
            HArray::Node(c) => Some(c.iter().map(|(k, _)| k.clone()).collect()),
            HArray::Leaf(_) => None,
        })
        .unwrap_or_default();
    let mut out = Vec::with_capacity(lens[0]);
    for (i, name) in names.into_iter().enumerate() {
        let sub: Vec<HArray<T>> = args
            .iter()
            .map(|a| match a {
                HArray::Node(c) => c[i].1.clone(),
                leaf => leaf.clone(),
            })
            .collect();
        out.push((name, zip_map(&sub, f)?));
    }
    Ok(HArray::Node(out))
}
