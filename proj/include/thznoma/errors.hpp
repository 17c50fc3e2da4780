// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace thznoma {

/// Channel matrix is rank-deficient where full column rank is required.
class SingularChannelError : public std::runtime_error {
public:
    explicit SingularChannelError(const std::string& what) : std::runtime_error(what) {}
};

/// A guarded enumeration (ML search, exhaustive clustering) would exceed its bound.
class SearchSpaceError : public std::runtime_error {
public:
    explicit SearchSpaceError(const std::string& what) : std::runtime_error(what) {}
};

/// Resource allocation cannot satisfy the request (e.g. fewer sub-bands than groups).
class AllocationError : public std::runtime_error {
public:
    explicit AllocationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace thznoma
