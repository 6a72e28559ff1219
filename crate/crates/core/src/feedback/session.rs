use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::bits::{BitReader, BitWriter};
use super::huffman::CodeTable;
use super::model::{ProbabilityMode, ProbabilityModel};
use super::SymbolVector;
use crate::codebook::TransitionTable;
use crate::error::{Error, Result};

/// One OFDM symbol's feedback bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedbackMessage {
    bytes: Vec<u8>,
    bit_count: usize,
    header_bits: u32,
}

impl FeedbackMessage {
    pub fn from_parts(bytes: Vec<u8>, bit_count: usize, header_bits: u32) -> Result<Self> {
        if bytes.len() != bit_count.div_ceil(8) {
            return Err(Error::framing(alloc::format!(
                "{} bytes cannot hold exactly {bit_count} bits",
                bytes.len()
            )));
        }
        if bit_count < header_bits as usize {
            return Err(Error::framing("message shorter than its header"));
        }
        Ok(FeedbackMessage {
            bytes,
            bit_count,
            header_bits,
        })
    }

    /// Packed bits, zero-padded to whole bytes.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bytes_mut(&mut self) -> &mut [u8] {
        &mut self.bytes
    }

    /// Unpadded length: header plus payload.
    pub fn bit_count(&self) -> usize {
        self.bit_count
    }

    pub fn header_bits(&self) -> u32 {
        self.header_bits
    }

    pub fn payload_bits(&self) -> usize {
        self.bit_count - self.header_bits as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// The receiver, which measures the channel and sends feedback.
    Encoder,
    /// The transmitter, which receives feedback.
    Decoder,
}

/// One end of the feedback link.
///
/// Messages must be processed in order; the session is a sequential state
/// machine. A *frozen* session codes with fixed tables and never updates.
#[derive(Debug, Clone)]
pub struct CodecSession {
    role: Role,
    table: Arc<TransitionTable>,
    model: ProbabilityModel,
    codes: Vec<CodeTable>,
    stale: Vec<bool>,
    header_bits: u32,
    messages: u64,
    rebuild_every: u64,
    frozen: bool,
}

impl CodecSession {
    /// Starts from the uniform model. `N` must be a power of two so the first
    /// index fits a whole number of header bits.
    pub fn new(role: Role, table: Arc<TransitionTable>, mode: ProbabilityMode) -> Result<Self> {
        let model = ProbabilityModel::new(mode, table.size());
        Self::with_model(role, table, model, false)
    }

    pub fn encoder(table: Arc<TransitionTable>, mode: ProbabilityMode) -> Result<Self> {
        Self::new(Role::Encoder, table, mode)
    }

    pub fn decoder(table: Arc<TransitionTable>, mode: ProbabilityMode) -> Result<Self> {
        Self::new(Role::Decoder, table, mode)
    }

    /// Codes every message with tables built once from `model`.
    pub fn frozen(role: Role, table: Arc<TransitionTable>, model: ProbabilityModel) -> Result<Self> {
        Self::with_model(role, table, model, true)
    }

    fn with_model(role: Role, table: Arc<TransitionTable>, model: ProbabilityModel, frozen: bool) -> Result<Self> {
        let n = table.size();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::config(alloc::format!(
                "codebook size {n} is not a power of two; the index header needs a whole number of bits"
            )));
        }
        if model.size() != n {
            return Err(Error::config(alloc::format!(
                "probability model covers {} symbols, codebook has {n}",
                model.size()
            )));
        }
        let codes = (0..model.contexts())
            .map(|ctx| CodeTable::from_weights(&model.weights(ctx)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CodecSession {
            role,
            table,
            stale: vec![false; model.contexts()],
            model,
            codes,
            header_bits: n.trailing_zeros(),
            messages: 0,
            rebuild_every: 1,
            frozen,
        })
    }

    /// Rebuild code tables only after every `interval`-th message. Counts are
    /// still updated after every message.
    pub fn with_rebuild_interval(mut self, interval: u64) -> Result<Self> {
        if interval == 0 {
            return Err(Error::config("rebuild interval must be at least 1"));
        }
        self.rebuild_every = interval;
        Ok(self)
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn model(&self) -> &ProbabilityModel {
        &self.model
    }

    pub fn transition_table(&self) -> &TransitionTable {
        &self.table
    }

    /// Code tables in force, one per model context.
    pub fn code_tables(&self) -> &[CodeTable] {
        &self.codes
    }

    pub fn code_for_source(&self, source: usize) -> &CodeTable {
        &self.codes[self.model.context_of(source)]
    }

    pub fn header_bits(&self) -> u32 {
        self.header_bits
    }

    /// Messages processed so far.
    pub fn messages(&self) -> u64 {
        self.messages
    }

    fn check_role(&self, expected: Role) -> Result<()> {
        if self.role != expected {
            return Err(Error::Role(alloc::format!(
                "{:?} session asked to act as {:?}",
                self.role,
                expected
            )));
        }
        Ok(())
    }

    pub fn encode_message(&mut self, sv: &SymbolVector) -> Result<FeedbackMessage> {
        self.check_role(Role::Encoder)?;
        let n = self.table.size();
        if sv.first_index >= n || sv.transitions.iter().any(|&k| k >= n) {
            return Err(Error::domain(alloc::format!(
                "symbol vector has entries outside 0..{n}"
            )));
        }
        let mut out = BitWriter::new();
        out.write_bits(sv.first_index as u64, self.header_bits);
        let mut source = sv.first_index;
        for &k in &sv.transitions {
            self.code_for_source(source).encode(k, &mut out);
            source = self.table.target(source, k);
        }
        let (bytes, bit_count) = out.finish();
        self.after_message(sv);
        Ok(FeedbackMessage {
            bytes,
            bit_count,
            header_bits: self.header_bits,
        })
    }

    pub fn decode_message(&mut self, msg: &FeedbackMessage) -> Result<SymbolVector> {
        self.check_role(Role::Decoder)?;
        if msg.header_bits != self.header_bits {
            return Err(Error::framing(alloc::format!(
                "message header is {} bits, session expects {}",
                msg.header_bits,
                self.header_bits
            )));
        }
        let mut input = BitReader::new(&msg.bytes, msg.bit_count);
        let first_index = input
            .read_bits(self.header_bits)
            .ok_or_else(|| Error::framing("message ends inside the index header"))? as usize;
        let mut transitions = Vec::new();
        let mut source = first_index;
        while input.remaining() > 0 {
            let k = self.code_for_source(source).decode(&mut input).ok_or_else(|| {
                Error::framing(alloc::format!(
                    "payload ends inside the codeword for cluster {}",
                    transitions.len() + 2
                ))
            })?;
            transitions.push(k);
            source = self.table.target(source, k);
        }
        let sv = SymbolVector {
            first_index,
            transitions,
        };
        self.after_message(&sv);
        Ok(sv)
    }

    fn after_message(&mut self, sv: &SymbolVector) {
        self.messages += 1;
        if self.frozen {
            return;
        }
        let mut source = sv.first_index;
        for &k in &sv.transitions {
            let ctx = self.model.context_of(source);
            self.model.observe(source, k);
            self.stale[ctx] = true;
            source = self.table.target(source, k);
        }
        if self.messages.is_multiple_of(self.rebuild_every) {
            for ctx in 0..self.codes.len() {
                if self.stale[ctx] {
                    self.codes[ctx] = CodeTable::from_weights(&self.model.weights(ctx))
                        .expect("smoothed weights are positive and finite");
                    self.stale[ctx] = false;
                }
            }
        }
    }
}
