#pragma once

// Compile-time check that a server-side state type list never names a key
// set, master key, cell identifier or filter. The checked types are only
// forward-declared here so this header pulls none of them in.

#include <array>
#include <cstddef>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace ppride::knn {
class UserKeySet;
class KeyFactory;
struct MasterKeys;
enum class Scheme : std::uint8_t;
template <Scheme S>
struct MasterKey;
}  // namespace ppride::knn

namespace ppride::bloom {
struct CellId;
class BloomFilter;
class EpochCodebook;
}  // namespace ppride::bloom

namespace ppride::trs {
struct TimedCell;
}

namespace ppride::tos {

template <typename T>
struct is_secret_or_plaintext : std::false_type {};

template <> struct is_secret_or_plaintext<knn::UserKeySet> : std::true_type {};
template <> struct is_secret_or_plaintext<knn::KeyFactory> : std::true_type {};
template <> struct is_secret_or_plaintext<knn::MasterKeys> : std::true_type {};
template <knn::Scheme S> struct is_secret_or_plaintext<knn::MasterKey<S>> : std::true_type {};
template <> struct is_secret_or_plaintext<bloom::CellId> : std::true_type {};
template <> struct is_secret_or_plaintext<bloom::BloomFilter> : std::true_type {};
template <> struct is_secret_or_plaintext<bloom::EpochCodebook> : std::true_type {};
template <> struct is_secret_or_plaintext<trs::TimedCell> : std::true_type {};

/// Looks through the standard containers a server might hold.
template <typename T>
struct tainted : is_secret_or_plaintext<std::remove_cv_t<T>> {};

template <typename T, typename A>
struct tainted<std::vector<T, A>> : tainted<T> {};
template <typename T, typename A>
struct tainted<std::deque<T, A>> : tainted<T> {};
template <typename T, std::size_t N>
struct tainted<std::array<T, N>> : tainted<T> {};
template <typename T>
struct tainted<std::optional<T>> : tainted<T> {};
template <typename T, typename D>
struct tainted<std::unique_ptr<T, D>> : tainted<T> {};
template <typename T>
struct tainted<std::shared_ptr<T>> : tainted<T> {};
template <typename T, typename C, typename A>
struct tainted<std::set<T, C, A>> : tainted<T> {};
template <typename K, typename V, typename C, typename A>
struct tainted<std::map<K, V, C, A>> : std::bool_constant<tainted<K>::value || tainted<V>::value> {};
template <typename K, typename V, typename H, typename E, typename A>
struct tainted<std::unordered_map<K, V, H, E, A>> : std::bool_constant<tainted<K>::value || tainted<V>::value> {};
template <typename A, typename B>
struct tainted<std::pair<A, B>> : std::bool_constant<tainted<A>::value || tainted<B>::value> {};
template <typename... Ts>
struct tainted<std::variant<Ts...>> : std::bool_constant<(tainted<Ts>::value || ...)> {};

template <typename... Ts>
struct type_list {};

template <typename L>
struct any_tainted;
template <typename... Ts>
struct any_tainted<type_list<Ts...>> : std::bool_constant<(tainted<Ts>::value || ...)> {};

}  // namespace ppride::tos
