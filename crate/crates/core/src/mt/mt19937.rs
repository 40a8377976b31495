/// Standard 32-bit Mersenne Twister.
const N: usize = 624;
const M: usize = 397;
const MATRIX_A: u32 = 0x9908_b0df;
const UPPER_MASK: u32 = 0x8000_0000;
const LOWER_MASK: u32 = 0x7fff_ffff;

/// Seed used by the reference implementation when none is given.
pub const DEFAULT_SEED: u32 = 5489;

#[derive(Clone)]
pub struct MtState {
    state: [u32; N],
    index: usize,
}

impl MtState {
    /// `init_genrand` from the reference code.
    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; N];
        state[0] = seed;
        for i in 1..N {
            let prev = state[i - 1];
            state[i] = 1_812_433_253u32
                .wrapping_mul(prev ^ (prev >> 30))
                .wrapping_add(i as u32);
        }
        MtState { state, index: N }
    }

    fn twist(&mut self) {
        for i in 0..N {
            let y = (self.state[i] & UPPER_MASK) | (self.state[(i + 1) % N] & LOWER_MASK);
            let mut next = self.state[(i + M) % N] ^ (y >> 1);
            if y & 1 != 0 {
                next ^= MATRIX_A;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.index >= N {
            self.twist();
        }
        let y = self.state[self.index];
        self.index += 1;
        temper(y)
    }

    pub fn position(&self) -> usize {
        self.index
    }

    pub fn next_words(&mut self, count: usize) -> Vec<u32> {
        (0..count).map(|_| self.next_u32()).collect()
    }
}

impl Default for MtState {
    fn default() -> Self {
        MtState::new(DEFAULT_SEED)
    }
}

impl Iterator for MtState {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        Some(self.next_u32())
    }
}

pub fn mt_init(seed: u32) -> MtState {
    MtState::new(seed)
}

pub fn mt_next(state: &mut MtState) -> u32 {
    state.next_u32()
}

/// First `count` outputs of a freshly seeded generator.
pub fn mt_outputs(seed: u32, count: usize) -> Vec<u32> {
    MtState::new(seed).next_words(count)
}

pub fn temper(mut y: u32) -> u32 {
    y ^= y >> 11;
    y ^= (y << 7) & 0x9d2c_5680;
    y ^= (y << 15) & 0xefc6_0000;
    y ^= y >> 18;
    y
}

pub fn untemper(mut y: u32) -> u32 {
    y ^= y >> 18;
    y ^= (y << 15) & 0xefc6_0000;
    // the 7-bit step needs repeated substitution to recover all 32 bits
    let mut x = y;
    for _ in 0..4 {
        x = y ^ ((x << 7) & 0x9d2c_5680);
    }
    y = x;
    let mut x = y;
    for _ in 0..2 {
        x = y ^ (x >> 11);
    }
    x
}
