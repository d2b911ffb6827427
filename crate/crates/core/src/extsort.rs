//! External merge sort for fixed-width records.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::par::Execution;

pub(crate) trait Record: Ord + Copy + Send + Sync {
    const SIZE: usize;
    fn encode(&self, out: &mut [u8]);
    fn decode(buf: &[u8]) -> Self;
}

pub(crate) struct ExternalSorter<R: Record> {
    buffer: Vec<R>,
    limit: usize,
    dir: PathBuf,
    prefix: &'static str,
    runs: Vec<PathBuf>,
    exec: Execution,
    combine: Option<fn(&mut R, R) -> bool>,
}

impl<R: Record> ExternalSorter<R> {
    /// `limit` is the number of buffered records before a run is spilled to
    /// `dir`. `combine(acc, next)` may fold an equal-key neighbour into `acc`
    /// and return true, which shrinks runs before they hit the disk.
    pub fn new(
        dir: &Path,
        prefix: &'static str,
        limit: usize,
        exec: Execution,
        combine: Option<fn(&mut R, R) -> bool>,
    ) -> Self {
        Self {
            buffer: Vec::new(),
            limit: limit.max(1),
            dir: dir.to_path_buf(),
            prefix,
            runs: Vec::new(),
            exec,
            combine,
        }
    }

    pub fn push(&mut self, r: R) -> io::Result<()> {
        self.buffer.push(r);
        if self.buffer.len() >= self.limit {
            self.spill()?;
        }
        Ok(())
    }

    pub fn spilled_runs(&self) -> usize {
        self.runs.len()
    }

    fn sort_buffer(&mut self) {
        #[cfg(feature = "parallel")]
        if self.exec.is_parallel() {
            use rayon::slice::ParallelSliceMut;
            self.buffer.par_sort_unstable();
        } else {
            self.buffer.sort_unstable();
        }
        #[cfg(not(feature = "parallel"))]
        self.buffer.sort_unstable();

        if let Some(combine) = self.combine {
            let mut out: Vec<R> = Vec::with_capacity(self.buffer.len());
            for r in self.buffer.drain(..) {
                let folded = out.last_mut().is_some_and(|last| combine(last, r));
                if !folded {
                    out.push(r);
                }
            }
            self.buffer = out;
        }
    }

    fn spill(&mut self) -> io::Result<()> {
        self.sort_buffer();
        let path = self
            .dir
            .join(format!("{}-{:05}.run", self.prefix, self.runs.len()));
        let mut w = BufWriter::new(File::create(&path)?);
        let mut buf = vec![0u8; R::SIZE];
        for r in &self.buffer {
            r.encode(&mut buf);
            w.write_all(&buf)?;
        }
        w.flush()?;
        self.buffer.clear();
        self.runs.push(path);
        Ok(())
    }

    /// Sorted stream of everything pushed. Equal records are not combined
    /// across runs; callers fold them while consuming.
    pub fn finish(mut self) -> io::Result<MergeIter<R>> {
        self.sort_buffer();
        let mut sources = Vec::with_capacity(self.runs.len() + 1);
        for path in &self.runs {
            sources.push(Source::Run(RunReader::open(path)?));
        }
        sources.push(Source::Mem(std::mem::take(&mut self.buffer).into_iter()));
        let mut heap = BinaryHeap::new();
        for (i, s) in sources.iter_mut().enumerate() {
            if let Some(r) = s.next_record()? {
                heap.push(Reverse((r, i)));
            }
        }
        Ok(MergeIter {
            sources,
            heap,
            runs: std::mem::take(&mut self.runs),
        })
    }
}

struct RunReader<R> {
    reader: BufReader<File>,
    buf: Vec<u8>,
    _marker: std::marker::PhantomData<R>,
}

impl<R: Record> RunReader<R> {
    fn open(path: &Path) -> io::Result<Self> {
        Ok(Self {
            reader: BufReader::with_capacity(1 << 16, File::open(path)?),
            buf: vec![0u8; R::SIZE],
            _marker: std::marker::PhantomData,
        })
    }

    fn next_record(&mut self) -> io::Result<Option<R>> {
        match self.reader.read_exact(&mut self.buf) {
            Ok(()) => Ok(Some(R::decode(&self.buf))),
            Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => Ok(None),
            Err(e) => Err(e),
        }
    }
}

enum Source<R> {
    Run(RunReader<R>),
    Mem(std::vec::IntoIter<R>),
}

impl<R: Record> Source<R> {
    fn next_record(&mut self) -> io::Result<Option<R>> {
        match self {
            Source::Run(r) => r.next_record(),
            Source::Mem(it) => Ok(it.next()),
        }
    }
}

pub(crate) struct MergeIter<R: Record> {
    sources: Vec<Source<R>>,
    heap: BinaryHeap<Reverse<(R, usize)>>,
    runs: Vec<PathBuf>,
}

impl<R: Record> Iterator for MergeIter<R> {
    type Item = io::Result<R>;

    fn next(&mut self) -> Option<Self::Item> {
        let Reverse((r, i)) = self.heap.pop()?;
        match self.sources[i].next_record() {
            Ok(Some(n)) => self.heap.push(Reverse((n, i))),
            Ok(None) => {}
            Err(e) => return Some(Err(e)),
        }
        Some(Ok(r))
    }
}

impl<R: Record> Drop for MergeIter<R> {
    fn drop(&mut self) {
        for p in &self.runs {
            let _ = std::fs::remove_file(p);
        }
    }
}
