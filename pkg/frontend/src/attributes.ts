/** The server's attribute registry, mirrored for the control panel. */

export const ATTRIBUTES = [
  "floor_price_mean",
  "sales_volume_mean",
  "holder_count_mean",
  "seller_count_mean",
  "buyer_count_mean",
  "whale_count_mean",
  "transfer_count_mean",
  "popularity_mean",
  "sentiment_mean",
  "days_since_launch",
  "holder_growth_rate",
  "sales_volatility",
] as const;
