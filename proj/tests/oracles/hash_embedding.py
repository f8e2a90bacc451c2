# Copyright 2026 The Pagewise Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Reference for the feature-hash embedding recipe.

Prints frozen vectors used by embedding_test.cpp.
"""
MASK = (1 << 64) - 1


def splitmix64(z):
    z = (z + 0x9E3779B97F4A7C15) & MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def embed(token_id, dim, seed):
    base = splitmix64(seed ^ splitmix64(token_id))
    out = []
    for j in range(dim):
        bits = splitmix64((base + j) & MASK) >> 11
        out.append(2.0 * bits * 2.0**-53 - 1.0)
    return out


if __name__ == "__main__":
    import struct
    for seed in (0, 7):
        v = embed(42, 8, seed)
        # Round to float32 like the C++ provider.
        f = [struct.unpack("f", struct.pack("f", x))[0] for x in v]
        print(f"seed={seed}", ", ".join(f"{x!r}f" for x in f))
