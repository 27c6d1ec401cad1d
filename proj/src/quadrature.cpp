#include "retsim/quadrature.hpp"

namespace retsim::quad {

const double kGaussNodes[kGaussOrder] = {
    -9.81560634246719244e-01,
    -9.04117256370474798e-01,
    -7.69902674194304693e-01,
    -5.87317954286617483e-01,
    -3.67831498998180184e-01,
    -1.25233408511468913e-01,
    1.25233408511468913e-01,
    3.67831498998180184e-01,
    5.87317954286617483e-01,
    7.69902674194304693e-01,
    9.04117256370474798e-01,
    9.81560634246719244e-01};

const double kGaussWeights[kGaussOrder] = {
    4.71753363865120220e-02,
    1.06939325995318885e-01,
    1.60078328543346110e-01,
    2.03167426723065647e-01,
    2.33492536538354639e-01,
    2.49147045813402690e-01,
    2.49147045813402690e-01,
    2.33492536538354639e-01,
    2.03167426723065647e-01,
    1.60078328543346110e-01,
    1.06939325995318885e-01,
    4.71753363865120220e-02};

}  // namespace retsim::quad
