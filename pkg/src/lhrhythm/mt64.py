"""64-bit Mersenne Twister (MT19937-64).

Straight port of the reference generator by Matsumoto and Nishimura
(mt19937-64.c, 2004 revision).  numpy only ships the 32-bit MT19937, and the
sampling jitter needs the 64-bit stream so that a given seed reproduces the
same sample times as any other conforming implementation.
"""

NN = 312
MM = 156
MATRIX_A = 0xB5026F5AA96619E9
UPPER_MASK = 0xFFFFFFFF80000000
LOWER_MASK = 0x000000007FFFFFFF
MASK64 = 0xFFFFFFFFFFFFFFFF

_MAG01 = (0, MATRIX_A)


class MT19937_64:
    """Reference MT19937-64 generator.

    >>> rng = MT19937_64(5489)
    >>> rng.next_uint64()
    14514284786278117030
    """

    def __init__(self, seed=5489):
        self.mt = [0] * NN
        self.mti = NN + 1
        self.seed(seed)

    def seed(self, seed):
        mt = self.mt
        mt[0] = seed & MASK64
        for i in range(1, NN):
            prev = mt[i - 1]
            mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK64
        self.mti = NN

    def seed_by_array(self, key):
        self.seed(19650218)
        mt = self.mt
        i, j = 1, 0
        key_length = len(key)
        for _ in range(max(NN, key_length)):
            prev = mt[i - 1]
            mt[i] = ((mt[i] ^ ((prev ^ (prev >> 62)) * 3935559000370003845))
                     + key[j] + j) & MASK64
            i += 1
            j += 1
            if i >= NN:
                mt[0] = mt[NN - 1]
                i = 1
            if j >= key_length:
                j = 0
        for _ in range(NN - 1):
            prev = mt[i - 1]
            mt[i] = ((mt[i] ^ ((prev ^ (prev >> 62)) * 2862933555777941757))
                     - i) & MASK64
            i += 1
            if i >= NN:
                mt[0] = mt[NN - 1]
                i = 1
        mt[0] = 1 << 63

    def _twist(self):
        mt = self.mt
        for i in range(NN - MM):
            x = (mt[i] & UPPER_MASK) | (mt[i + 1] & LOWER_MASK)
            mt[i] = mt[i + MM] ^ (x >> 1) ^ _MAG01[x & 1]
        for i in range(NN - MM, NN - 1):
            x = (mt[i] & UPPER_MASK) | (mt[i + 1] & LOWER_MASK)
            mt[i] = mt[i + (MM - NN)] ^ (x >> 1) ^ _MAG01[x & 1]
        x = (mt[NN - 1] & UPPER_MASK) | (mt[0] & LOWER_MASK)
        mt[NN - 1] = mt[MM - 1] ^ (x >> 1) ^ _MAG01[x & 1]
        self.mti = 0

    def next_uint64(self):
        if self.mti >= NN:
            self._twist()
        x = self.mt[self.mti]
        self.mti += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & MASK64

    def real1(self):
        """Uniform draw on the closed interval [0, 1] (genrand64_real1)."""
        return (self.next_uint64() >> 11) * (1.0 / 9007199254740991.0)

    def real2(self):
        """Uniform draw on [0, 1) (genrand64_real2)."""
        return (self.next_uint64() >> 11) * (1.0 / 9007199254740992.0)
