#include "aquafeat/kernels.hpp"

namespace aquafeat::kernels {

const KernelTable& scalar_table() {
  static const KernelTable table = {
      "scalar",
      &ref::axpy<float>,
      &ref::axpy_gather2<float>,
      &ref::axpy_scatter2<float>,
      &ref::dot<float>,
      &ref::dot_gather2<float>,
      &ref::sum<float>,
      &ref::add<float>,
      &ref::mul<float>,
      &ref::scale<float>,
      &ref::leaky_forward<float>,
      &ref::leaky_backward_acc<float>,
      &ref::adamw_update<float>,
  };
  return table;
}

}  // namespace aquafeat::kernels
