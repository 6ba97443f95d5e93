//! The bundled example programs and their candidate assignments.

#[derive(Clone, Copy, Debug)]
pub struct CorpusProgram {
    pub name: &'static str,
    pub source: &'static str,
    pub assignment: &'static str,
}

pub const CELL: CorpusProgram = CorpusProgram {
    name: "cell",
    source: include_str!("../corpus/cell.spi"),
    assignment: include_str!("../corpus/cell.qi.json"),
};

pub const SERVER: CorpusProgram = CorpusProgram {
    name: "server",
    source: include_str!("../corpus/server.spi"),
    assignment: include_str!("../corpus/server.qi.json"),
};

pub const ABC: CorpusProgram = CorpusProgram {
    name: "abc",
    source: include_str!("../corpus/abc.spi"),
    assignment: include_str!("../corpus/abc.qi.json"),
};

pub const ALL: [CorpusProgram; 3] = [CELL, SERVER, ABC];

pub fn by_name(name: &str) -> Option<CorpusProgram> {
    ALL.iter().copied().find(|p| p.name == name)
}
