//! Global atom table. Variables and applied function symbols are interned so
//! that monomials can be stored as small sorted vectors of ids.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use super::ScalarExpr;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct AtomId(u32);

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AtomData {
    Var(String),
    /// `name` differentiated `deriv[i]` times in its i-th slot, applied to `args`.
    Fun {
        name: String,
        deriv: Vec<u32>,
        args: Vec<ScalarExpr>,
    },
}

/// Structural sort key: variables before functions, then by printed form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub(crate) struct AtomKey {
    kind: u8,
    name: String,
    deriv: Vec<u32>,
    args: String,
}

struct Table {
    ids: HashMap<Arc<AtomData>, AtomId>,
    data: Vec<(Arc<AtomData>, Arc<AtomKey>)>,
}

fn table() -> &'static RwLock<Table> {
    static TABLE: OnceLock<RwLock<Table>> = OnceLock::new();
    TABLE.get_or_init(|| {
        RwLock::new(Table {
            ids: HashMap::new(),
            data: Vec::new(),
        })
    })
}

pub(crate) fn intern(data: AtomData) -> AtomId {
    if let Some(id) = table().read().unwrap().ids.get(&data) {
        return *id;
    }
    let key = match &data {
        AtomData::Var(n) => AtomKey {
            kind: 0,
            name: n.clone(),
            deriv: Vec::new(),
            args: String::new(),
        },
        AtomData::Fun { name, deriv, args } => AtomKey {
            kind: 1,
            name: name.clone(),
            deriv: deriv.clone(),
            args: args.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(", "),
        },
    };
    let mut t = table().write().unwrap();
    if let Some(id) = t.ids.get(&data) {
        return *id;
    }
    let id = AtomId(t.data.len() as u32);
    let data = Arc::new(data);
    t.ids.insert(data.clone(), id);
    t.data.push((data, Arc::new(key)));
    id
}

pub(crate) fn data(id: AtomId) -> Arc<AtomData> {
    table().read().unwrap().data[id.0 as usize].0.clone()
}

pub(crate) fn key(id: AtomId) -> Arc<AtomKey> {
    table().read().unwrap().data[id.0 as usize].1.clone()
}

pub(crate) fn is_var(id: AtomId) -> bool {
    matches!(*data(id), AtomData::Var(_))
}
