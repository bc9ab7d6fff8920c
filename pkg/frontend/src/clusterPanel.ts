import { ApiError, ClusterRequest } from "./types.js";

/**
 * Form model behind the clustering controls. Validation mirrors the backend
 * contract so most mistakes are caught before a request; server rejections
 * land back on the offending field.
 */

export interface ClusterFormValues {
  algorithm: "kmeans" | "hierarchical" | "minmax";
  nClusters: number;
  linkage: "single" | "complete" | "average" | "ward";
  reduction: "none" | "pca" | "tsne";
  varianceFraction: number;
  perplexity: number;
  seed: number;
}

export const DEFAULT_FORM: ClusterFormValues = {
  algorithm: "kmeans",
  nClusters: 5,
  linkage: "ward",
  reduction: "none",
  varianceFraction: 0.95,
  perplexity: 30,
  seed: 0,
};

export type FieldErrors = Partial<Record<string, string>>;

export function validateForm(values: ClusterFormValues, nPoints: number): FieldErrors {
  const errors: FieldErrors = {};
  if (!Number.isInteger(values.nClusters) || values.nClusters < 1) {
    errors.n_clusters = "number of clusters must be a positive integer";
  } else if (values.nClusters > nPoints) {
    errors.n_clusters = `at most ${nPoints} clusters for ${nPoints} points`;
  }
  if (values.reduction === "pca" &&
      !(values.varianceFraction > 0 && values.varianceFraction <= 1)) {
    errors.variance_fraction = "variance fraction must be in (0, 1]";
  }
  if (values.reduction === "tsne") {
    if (!(values.perplexity > 0)) {
      errors.perplexity = "perplexity must be positive";
    } else if (values.perplexity >= nPoints) {
      errors.perplexity = `perplexity must be below the point count (${nPoints})`;
    }
  }
  return errors;
}

export function toRequest(values: ClusterFormValues, toGroups: boolean): ClusterRequest {
  const request: ClusterRequest = {
    algorithm: values.algorithm,
    n_clusters: values.nClusters,
    seed: values.seed,
    to_groups: toGroups,
  };
  if (values.algorithm === "hierarchical") {
    request.linkage = values.linkage;
  }
  if (values.reduction === "pca") {
    request.reduction = { kind: "pca", variance_fraction: values.varianceFraction };
  } else if (values.reduction === "tsne") {
    request.reduction = { kind: "tsne", perplexity: values.perplexity, seed: values.seed };
  }
  return request;
}

/** Map a backend rejection to the form field it belongs to. */
export function errorsFromApi(error: ApiError): FieldErrors {
  if (error.field) {
    return { [error.field]: error.message };
  }
  if (error.code === "k_too_large") {
    return { n_clusters: error.message };
  }
  if (error.code === "perplexity_too_large" || error.code === "too_few_points") {
    return { perplexity: error.message };
  }
  if (error.code === "invalid_fraction") {
    return { variance_fraction: error.message };
  }
  return { form: error.message };
}
